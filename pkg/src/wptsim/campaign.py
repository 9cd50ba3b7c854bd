"""Campaign runner: sweeps strategies x M x N x K over locations to CSV.

A campaign evaluates every configured sweep point (strategy, antenna count,
tone count, codebook size) at every location for a number of frames, and
writes two artifacts:

* detail CSV - one row per (sweep point, location, frame) with the
  WPT-phase dc power, RF power, selection/feedback outcome, and per-phase
  energies;
* summary CSV - per (sweep point, location) mean dc power plus one
  aggregate row per sweep point (location "ALL", mean over frames then over
  locations), each with its dB gain against the (UP, M=1, N=1) baseline at
  the same location (so every baseline row reads exactly 0 dB).

Determinism contract: all randomness is keyed by (seed, purpose, indices)
Philox streams, work items are independent, and rows are sorted by the
literal tuple (strategy, M, N, K, location, frame) before writing, so the
bytes never depend on scheduling or the number of worker threads.  Floats
are written with 6 significant digits ("%.6g"), gains with 4 decimals.
"""

from __future__ import annotations

import concurrent.futures
import configparser
import os
from dataclasses import dataclass

import numpy as np

from . import rng as rngmod
from .channel import (ChannelModelParams, ChannelRealization,
                      frequency_response, make_locations, sample_taps)
from .codebook import gen_nested, gen_random, train_lloyd
from .errors import ConfigError, DomainError, SummaryError
from .protocol import FrameConfig, LinkModel, run_session
from .protocol import _dc_power
from .rectenna import AdcConfig, DiodeMomentModel, EfficiencyTableModel
from .strategies import SmfParams, smf_weights, up_weights
from .waveform import ToneGrid, effective_tones, received_rf_power

UP, SMF, LIMITED = "UP", "SMF", "LIMITED"
_STRATEGY_IDS = {UP: 0, SMF: 1, LIMITED: 2}

DETAIL_HEADER = ("strategy,M,N,K,location,frame,p_dc_w,p_rf_w,selected_k,"
                 "applied_k,feedback_ok,e_train_j,e_wpt_j")
SUMMARY_HEADER = "strategy,M,N,K,location,p_dc_mean_w,gain_db"

#: location label of the per-sweep-point aggregate summary row
ALL_LOCATIONS = "ALL"


@dataclass(frozen=True)
class CampaignConfig:
    """Everything a campaign needs; see README for the config file schema."""

    strategies: tuple = (UP, SMF, LIMITED)
    antenna_counts: tuple = (1, 2, 4)
    tone_counts: tuple = (1, 2, 4, 8)
    codebook_sizes: tuple = (2, 4, 8, 16, 32, 64)
    n_locations: int = 15
    frames_per_location: int = 3
    seed: int = 20260818
    transmit_power_w: float = 2.0
    center_frequency_hz: float = 2.4e9
    bandwidth_hz: float = 10e6
    n_taps: int = 8
    tap_spacing_s: float = 100e-9
    pdp_decay: float = 0.7
    pathloss_db_min: float = 55.0
    pathloss_db_max: float = 70.0
    resample_per_frame: bool = True
    rectifier_model: str = "moment"     # "moment" or "table"
    k2: float = 0.17
    k4: float = 19.1
    alpha: float = 1.0
    table_path: str = ""
    adc_enabled: bool = False
    adc_resolution_bits: int = 12
    adc_v_ref: float = 3.3
    adc_noise_sigma: float = 0.0
    adc_load_resistance: float = 5000.0
    link_delivery_probability: float = 1.0
    link_latency_s: float = 0.0
    t_s: float = 0.010
    t_frame: float = 2.0
    codebook_method: str = "nested"     # "nested", "random", or "lloyd"
    training_channels: int = 1000
    training_iters: int = 30
    output_dir: str = "out"

    def __post_init__(self):
        if not self.strategies:
            raise ConfigError("strategies axis is empty")
        object.__setattr__(self, "strategies",
                           tuple(sorted(set(self.strategies))))
        for s in self.strategies:
            if s not in _STRATEGY_IDS:
                raise ConfigError(f"unknown strategy {s!r}")
        for name in ("antenna_counts", "tone_counts"):
            axis = tuple(sorted(set(getattr(self, name))))
            if not axis or any(v < 1 for v in axis):
                raise ConfigError(f"{name} must be a non-empty set of ints >= 1")
            object.__setattr__(self, name, axis)
        object.__setattr__(self, "codebook_sizes",
                           tuple(sorted(set(self.codebook_sizes))))
        if LIMITED in self.strategies:
            if not self.codebook_sizes:
                raise ConfigError("LIMITED strategy needs codebook_sizes")
            if any(k < 1 for k in self.codebook_sizes):
                raise ConfigError("codebook_sizes must be >= 1")
            if self.codebook_method == "nested" and any(
                    k & (k - 1) for k in self.codebook_sizes):
                raise ConfigError(
                    "nested codebooks require power-of-two sizes")
            if not max(self.codebook_sizes) * self.t_s < self.t_frame:
                raise ConfigError(
                    f"K*t_s must stay below t_frame, got K="
                    f"{max(self.codebook_sizes)}, t_s={self.t_s}, "
                    f"t_frame={self.t_frame}")
        if self.n_locations < 1 or self.frames_per_location < 1:
            raise ConfigError("need at least one location and one frame")
        if self.rectifier_model not in ("moment", "table"):
            raise ConfigError(f"unknown rectifier model {self.rectifier_model!r}")
        if self.rectifier_model == "table" and not self.table_path:
            raise ConfigError("table rectifier needs table_path")
        if self.codebook_method not in ("nested", "random", "lloyd"):
            raise ConfigError(f"unknown codebook method {self.codebook_method!r}")
        if self.pathloss_db_max < self.pathloss_db_min:
            raise ConfigError("empty pathloss range")

    @property
    def channel_template(self) -> ChannelModelParams:
        return ChannelModelParams(n_taps=self.n_taps,
                                  tap_spacing_s=self.tap_spacing_s,
                                  pdp_decay=self.pdp_decay,
                                  pathloss_db=self.pathloss_db_min,
                                  seed=0)


@dataclass(frozen=True)
class SummaryRow:
    """One summary line: per-location or ALL-aggregate mean and gain."""

    strategy: str
    m_antennas: int
    n_tones: int
    k_codewords: int
    location: str
    p_dc_mean_w: float
    gain_db: float


# ---------------------------------------------------------------------------
# config file parsing (INI sections; unknown keys are errors)

_SCHEMA = {
    "campaign": {"strategies", "antenna_counts", "tone_counts",
                 "codebook_sizes", "frames_per_location", "seed"},
    "grid": {"center_frequency_hz", "bandwidth_hz"},
    "power": {"transmit_power_w"},
    "channel": {"n_taps", "tap_spacing_s", "pdp_decay", "n_locations",
                "pathloss_db_min", "pathloss_db_max", "resample_per_frame"},
    "rectifier": {"model", "k2", "k4", "alpha", "table_path"},
    "adc": {"enabled", "resolution_bits", "v_ref_v", "noise_sigma_v",
            "load_resistance_ohm"},
    "link": {"delivery_probability", "latency_s"},
    "frame": {"t_s_s", "t_frame_s"},
    "codebook": {"method", "training_channels", "training_iters"},
    "output": {"dir"},
}


def load_config(path) -> CampaignConfig:
    """Parse the sectioned key-value config file into a CampaignConfig."""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        parser.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"{path}: unknown section [{section}]")
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(
                    f"{path}: unknown key {key!r} in section [{section}]")

    def get(section, key, conv, default):
        if section in parser and key in parser[section]:
            raw = parser[section][key]
            try:
                return conv(raw)
            except ValueError as exc:
                raise ConfigError(
                    f"{path}: bad value for [{section}] {key} = {raw!r}: "
                    f"{exc}") from exc
        return default

    def str_list(raw):
        return tuple(x.strip() for x in raw.split(",") if x.strip())

    def int_list(raw):
        return tuple(int(x) for x in str_list(raw))

    def boolean(raw):
        lowered = raw.strip().lower()
        if lowered in ("true", "1", "yes", "on"):
            return True
        if lowered in ("false", "0", "no", "off"):
            return False
        raise ValueError(f"not a boolean: {raw!r}")

    default = CampaignConfig()
    try:
        return CampaignConfig(
            strategies=get("campaign", "strategies", str_list,
                           default.strategies),
            antenna_counts=get("campaign", "antenna_counts", int_list,
                               default.antenna_counts),
            tone_counts=get("campaign", "tone_counts", int_list,
                            default.tone_counts),
            codebook_sizes=get("campaign", "codebook_sizes", int_list,
                               default.codebook_sizes),
            frames_per_location=get("campaign", "frames_per_location", int,
                                    default.frames_per_location),
            seed=get("campaign", "seed", int, default.seed),
            center_frequency_hz=get("grid", "center_frequency_hz", float,
                                    default.center_frequency_hz),
            bandwidth_hz=get("grid", "bandwidth_hz", float,
                             default.bandwidth_hz),
            transmit_power_w=get("power", "transmit_power_w", float,
                                 default.transmit_power_w),
            n_taps=get("channel", "n_taps", int, default.n_taps),
            tap_spacing_s=get("channel", "tap_spacing_s", float,
                              default.tap_spacing_s),
            pdp_decay=get("channel", "pdp_decay", float, default.pdp_decay),
            n_locations=get("channel", "n_locations", int,
                            default.n_locations),
            pathloss_db_min=get("channel", "pathloss_db_min", float,
                                default.pathloss_db_min),
            pathloss_db_max=get("channel", "pathloss_db_max", float,
                                default.pathloss_db_max),
            resample_per_frame=get("channel", "resample_per_frame", boolean,
                                   default.resample_per_frame),
            rectifier_model=get("rectifier", "model", str.strip,
                                default.rectifier_model),
            k2=get("rectifier", "k2", float, default.k2),
            k4=get("rectifier", "k4", float, default.k4),
            alpha=get("rectifier", "alpha", float, default.alpha),
            table_path=get("rectifier", "table_path", str.strip,
                           default.table_path),
            adc_enabled=get("adc", "enabled", boolean, default.adc_enabled),
            adc_resolution_bits=get("adc", "resolution_bits", int,
                                    default.adc_resolution_bits),
            adc_v_ref=get("adc", "v_ref_v", float, default.adc_v_ref),
            adc_noise_sigma=get("adc", "noise_sigma_v", float,
                                default.adc_noise_sigma),
            adc_load_resistance=get("adc", "load_resistance_ohm", float,
                                    default.adc_load_resistance),
            link_delivery_probability=get("link", "delivery_probability",
                                          float,
                                          default.link_delivery_probability),
            link_latency_s=get("link", "latency_s", float,
                               default.link_latency_s),
            t_s=get("frame", "t_s_s", float, default.t_s),
            t_frame=get("frame", "t_frame_s", float, default.t_frame),
            codebook_method=get("codebook", "method", str.strip,
                                default.codebook_method),
            training_channels=get("codebook", "training_channels", int,
                                  default.training_channels),
            training_iters=get("codebook", "training_iters", int,
                               default.training_iters),
            output_dir=get("output", "dir", str.strip, default.output_dir),
        )
    except DomainError as exc:
        raise ConfigError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# execution

def _fmt(x: float) -> str:
    return format(float(x), ".6g")


def _rect_model(config: CampaignConfig):
    if config.rectifier_model == "moment":
        return DiodeMomentModel(k2=config.k2, k4=config.k4, alpha=config.alpha)
    return EfficiencyTableModel.from_csv(config.table_path)


def _training_set(config: CampaignConfig, m: int, grid: ToneGrid) -> list:
    """Training channels drawn from the campaign's channel family."""
    params = ChannelModelParams(
        n_taps=config.n_taps, tap_spacing_s=config.tap_spacing_s,
        pdp_decay=config.pdp_decay,
        pathloss_db=0.5 * (config.pathloss_db_min + config.pathloss_db_max),
        seed=rngmod.derive_seed(config.seed, rngmod.TRAINING, m, grid.n_tones))
    channels = []
    for i in range(config.training_channels):
        gen = rngmod.stream(params.seed, rngmod.TAPS, i)
        taps = sample_taps(params, m, gen)
        gains = frequency_response(taps, params, grid)
        channels.append(ChannelRealization(m_antennas=m, grid=grid,
                                           gains=gains))
    return channels


def _build_codebooks(config: CampaignConfig, rect_model) -> dict:
    """One codebook per (M, N, K), keyed deterministically by the seed."""
    books: dict = {}
    if LIMITED not in config.strategies:
        return books
    k_max = max(config.codebook_sizes)
    for m in config.antenna_counts:
        for n in config.tone_counts:
            grid = ToneGrid.centered(config.center_frequency_hz,
                                     config.bandwidth_hz, n)
            gen = rngmod.stream(config.seed, rngmod.CODEBOOK, m, n)
            if config.codebook_method == "nested":
                full = gen_nested(m, grid, config.transmit_power_w, k_max, gen)
                for k in config.codebook_sizes:
                    books[(m, n, k)] = full.prefix(k)
            elif config.codebook_method == "random":
                for k in config.codebook_sizes:
                    books[(m, n, k)] = gen_random(
                        m, grid, config.transmit_power_w, k,
                        rngmod.stream(config.seed, rngmod.CODEBOOK, m, n, k))
            else:  # lloyd
                training = _training_set(config, m, grid)
                for k in config.codebook_sizes:
                    books[(m, n, k)] = train_lloyd(
                        training, k, rect_model, iters=config.training_iters,
                        rng=rngmod.stream(config.seed, rngmod.TRAINING,
                                          m, n, k),
                        power=config.transmit_power_w)
    return books


def _channel_factory(config: CampaignConfig, location, m: int, m_max: int,
                     grid: ToneGrid):
    """Per-frame channels; all sweep points at a location share the fade.

    Taps are always drawn for the campaign's largest antenna count and the
    first m rows are used, so smaller arrays see a subset of the same
    physical channel rather than an unrelated draw.
    """
    def factory(frame: int) -> ChannelRealization:
        idx = frame if config.resample_per_frame else 0
        gen = rngmod.stream(location.params.seed, rngmod.TAPS, idx)
        taps = sample_taps(location.params, m_max, gen)[:m]
        gains = frequency_response(taps, location.params, grid)
        return ChannelRealization(m_antennas=m, grid=grid, gains=gains,
                                  location_label=location.label)
    return factory


def _run_item(config: CampaignConfig, rect_model, books, locations,
              m_max: int, item) -> list[tuple]:
    strategy, m, n, k, loc_idx = item
    location = locations[loc_idx]
    grid = ToneGrid.centered(config.center_frequency_hz, config.bandwidth_hz, n)
    channel_for = _channel_factory(config, location, m, m_max, grid)
    rows = []
    if strategy == LIMITED:
        frame_cfg = FrameConfig(k_codewords=k, t_s=config.t_s,
                                t_frame=config.t_frame)
        adc = AdcConfig(resolution_bits=config.adc_resolution_bits,
                        v_ref=config.adc_v_ref,
                        noise_sigma=config.adc_noise_sigma,
                        load_resistance=config.adc_load_resistance) \
            if config.adc_enabled else None
        link = LinkModel(delivery_probability=config.link_delivery_probability,
                         latency=config.link_latency_s)
        gen = rngmod.stream(config.seed, rngmod.SESSION,
                            _STRATEGY_IDS[strategy], m, n, k, loc_idx)
        reports = run_session(frame_cfg, books[(m, n, k)], channel_for,
                              rect_model, adc, link,
                              config.frames_per_location, gen)
        for r in reports:
            rows.append((strategy, m, n, k, location.label, r.frame_id,
                         r.p_dc_wpt, r.p_rf_wpt, r.selected_index,
                         r.applied_index, int(r.feedback_delivered),
                         r.energy_training, r.energy_wpt))
    else:
        smf_params = SmfParams(beta=3.0, power_budget=config.transmit_power_w)
        for frame in range(config.frames_per_location):
            ch = channel_for(frame)
            if strategy == UP:
                w = up_weights(m, grid, config.transmit_power_w)
            else:
                w = smf_weights(ch, smf_params)
            tones = effective_tones(ch, w)
            p_dc = _dc_power(rect_model, tones, grid)
            p_rf = received_rf_power(tones)
            rows.append((strategy, m, n, 0, location.label, frame, p_dc, p_rf,
                         0, 0, 1, 0.0, p_dc * config.t_frame))
    return rows


def run_campaign(config: CampaignConfig, out_dir=None,
                 jobs: int = 1) -> tuple[str, str]:
    """Execute the campaign and write detail.csv and summary.csv.

    Args:
        config: campaign description.
        out_dir: output directory; defaults to config.output_dir.
        jobs: worker threads for independent work items; the output bytes
            are identical for any value.

    Returns:
        (detail_path, summary_path).
    """
    out = str(out_dir) if out_dir is not None else config.output_dir
    os.makedirs(out, exist_ok=True)
    probe = os.path.join(out, ".write_probe")
    try:
        with open(probe, "w") as fh:
            fh.write("ok")
        os.remove(probe)
    except OSError as exc:
        raise OSError(f"output directory {out!r} is not writable: {exc}")

    rect_model = _rect_model(config)
    locations = make_locations(config.n_locations, config.seed,
                               config.channel_template,
                               (config.pathloss_db_min, config.pathloss_db_max))
    books = _build_codebooks(config, rect_model)
    m_max = max(config.antenna_counts)

    items = []
    for strategy in config.strategies:
        sizes = config.codebook_sizes if strategy == LIMITED else (0,)
        for m in config.antenna_counts:
            for n in config.tone_counts:
                for k in sizes:
                    for loc_idx in range(config.n_locations):
                        items.append((strategy, m, n, k, loc_idx))

    results: dict = {}
    if jobs <= 1:
        for item in items:
            results[item] = _run_item(config, rect_model, books, locations,
                                      m_max, item)
    else:
        with concurrent.futures.ThreadPoolExecutor(max_workers=jobs) as pool:
            futures = {pool.submit(_run_item, config, rect_model, books,
                                   locations, m_max, item): item
                       for item in items}
            for fut in concurrent.futures.as_completed(futures):
                results[futures[fut]] = fut.result()

    rows = [row for item in items for row in results[item]]
    rows.sort(key=lambda r: (r[0], r[1], r[2], r[3], r[4], r[5]))

    detail_path = os.path.join(out, "detail.csv")
    with open(detail_path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(DETAIL_HEADER + "\n")
        for r in rows:
            fh.write(",".join([r[0], str(r[1]), str(r[2]), str(r[3]), r[4],
                               str(r[5]), _fmt(r[6]), _fmt(r[7]), str(r[8]),
                               str(r[9]), str(r[10]), _fmt(r[11]),
                               _fmt(r[12])]) + "\n")

    summary_path = os.path.join(out, "summary.csv")
    summarize(detail_path, summary_path)
    return detail_path, summary_path


# ---------------------------------------------------------------------------
# aggregation

def db_gain(p: float, p_ref: float) -> float:
    """10*log10(p/p_ref); both arguments must be positive."""
    if not p > 0 or not p_ref > 0:
        raise DomainError(f"db_gain needs positive powers, got {p}, {p_ref}")
    return 10.0 * float(np.log10(p / p_ref))


def summarize(detail_path, out_path=None) -> list[SummaryRow]:
    """Aggregate a detail CSV into summary rows (and optionally a file).

    Per (strategy, M, N, K, location): mean dc power over frames.  Per
    (strategy, M, N, K): the ALL row, mean of the location means.  Gains
    are taken against the (UP, M=1, N=1) mean at the same location (or the
    ALL baseline for ALL rows), so baseline rows are exactly 0 dB.  Rows
    are sorted lexicographically; means are accumulated in sorted row
    order, making the output independent of input row order.
    """
    with open(detail_path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != DETAIL_HEADER:
        raise SummaryError(f"{detail_path}: missing or wrong detail header")
    parsed = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 13:
            raise SummaryError(f"{detail_path}:{lineno}: expected 13 fields")
        try:
            parsed.append((parts[0], int(parts[1]), int(parts[2]),
                           int(parts[3]), parts[4], int(parts[5]),
                           float(parts[6])))
        except ValueError as exc:
            raise SummaryError(f"{detail_path}:{lineno}: {exc}") from exc
    if not parsed:
        raise SummaryError(f"{detail_path}: no data rows")
    parsed.sort(key=lambda r: (r[0], r[1], r[2], r[3], r[4], r[5]))

    loc_means: dict = {}
    for row in parsed:
        key = row[:5]
        acc = loc_means.setdefault(key, [0.0, 0])
        acc[0] += row[6]
        acc[1] += 1
    loc_mean = {key: acc[0] / acc[1] for key, acc in loc_means.items()}

    point_means: dict = {}
    for key in sorted(loc_mean):
        point = key[:4]
        acc = point_means.setdefault(point, [0.0, 0])
        acc[0] += loc_mean[key]
        acc[1] += 1
    point_mean = {p: acc[0] / acc[1] for p, acc in point_means.items()}

    baseline_point = (UP, 1, 1, 0)
    if baseline_point not in point_mean:
        raise SummaryError(
            "missing baseline rows (strategy=UP, M=1, N=1, K=0)")

    rows = []
    for key in sorted(loc_mean):
        strategy, m, n, k, location = key
        base_key = baseline_point + (location,)
        if base_key not in loc_mean:
            raise SummaryError(
                f"missing baseline row (strategy=UP, M=1, N=1, K=0, "
                f"location={location})")
        rows.append(SummaryRow(strategy, m, n, k, location, loc_mean[key],
                               db_gain(loc_mean[key], loc_mean[base_key])))
    for point in sorted(point_mean):
        strategy, m, n, k = point
        rows.append(SummaryRow(strategy, m, n, k, ALL_LOCATIONS,
                               point_mean[point],
                               db_gain(point_mean[point],
                                       point_mean[baseline_point])))
    rows.sort(key=lambda r: (r.strategy, r.m_antennas, r.n_tones,
                             r.k_codewords, r.location))

    if out_path is not None:
        with open(out_path, "w", encoding="ascii", newline="\n") as fh:
            fh.write(SUMMARY_HEADER + "\n")
            for r in rows:
                fh.write(f"{r.strategy},{r.m_antennas},{r.n_tones},"
                         f"{r.k_codewords},{r.location},{_fmt(r.p_dc_mean_w)},"
                         f"{r.gain_db:.4f}\n")
    return rows


# ---------------------------------------------------------------------------
# pre-canned sweeps

def figure_config(name: str, seed: int | None = None) -> CampaignConfig:
    """Pre-canned campaign configs for the three standard sweeps.

    figure-bf: dc power vs antenna count (M in {1,2,4}, N=1).
    figure-wf: dc power vs tone count (M=1, N in {1,2,4,8}).
    figure-joint: the full M x N product (M in {1,2,4}, N in {1,2,4,8};
    M=1, N=1 doubles as the gain baseline).

    All three use 15 locations with pathloss uniform in [55, 70] dB (an
    assumption, not a measured geometry) and nested codebooks swept over
    K in {2,...,64}.
    """
    axes = {
        "figure-bf": ((1, 2, 4), (1,)),
        "figure-wf": ((1,), (1, 2, 4, 8)),
        "figure-joint": ((1, 2, 4), (1, 2, 4, 8)),
    }
    if name not in axes:
        raise ConfigError(f"unknown sweep {name!r}; "
                          f"expected one of {sorted(axes)}")
    antennas, tones = axes[name]
    kwargs = {}
    if seed is not None:
        kwargs["seed"] = seed
    return CampaignConfig(strategies=(UP, SMF, LIMITED),
                          antenna_counts=antennas, tone_counts=tones,
                          codebook_sizes=(2, 4, 8, 16, 32, 64),
                          output_dir=os.path.join("out", name), **kwargs)
