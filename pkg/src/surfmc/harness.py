"""Seeded Monte Carlo campaigns comparing decoders, with paired trials.

Every enabled decoder sees the identical sampled error and syndrome in each
trial, which slashes the variance of rate-ratio estimates; per-trial random
streams are derived from the master seed with counter-based spawn keys, so the
worker count never changes any result and identical configs produce
byte-identical CSV output.  Campaigns run until every enabled algorithm has
accumulated the target number of logical errors (or a fixed trial budget is
exhausted), evaluated at fixed batch boundaries.
"""

from __future__ import annotations

import concurrent.futures
import functools
import hashlib
import math
import os
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, InvalidParameterError
from .geometry import CodeLayout, PauliFrame, build_layout
from .matching import ClassChainSet, decode_both, decode_enhanced, decode_standard
from .mcmc import (
    SingleTempConfig,
    decode_free_energy,
    decode_single_temperature,
    distinguishability,
    free_energy_temperatures,
)
from .noise import DEPOLARIZING, INDEPENDENT_XZ, NoiseModel, beta_bar, sample_frame
from .oracle import exact_decoder
from .stats import mcnemar_one_sided_pvalue, wilson_interval

STANDARD = "standard_mwpm"
ENHANCED = "enhanced_mwpm"
SINGLE_TEMP = "single_temperature"
FREE_ENERGY = "free_energy"
ALGORITHMS = (STANDARD, ENHANCED, SINGLE_TEMP, FREE_ENERGY)

WORKERS_ENV_VAR = "SURFMC_WORKERS"
CSV_HEADER = "L,p,model,algorithm,trials,failures,rate,ci_low,ci_high,seed"
TRUNCATION_MARKER = "# truncated"

_BATCH_SIZE = 64


@dataclass(frozen=True)
class ExperimentConfig:
    """Campaign definition; the seed is mandatory (no wall-clock seeding)."""

    L_values: tuple[int, ...]
    p_values: tuple[float, ...]
    seed: int
    model_kind: str = DEPOLARIZING
    algorithms: tuple[str, ...] = (STANDARD, ENHANCED, SINGLE_TEMP)
    n_sample: int | None = None            # None: L^4 per code size
    beta_star_factor: float | None = None  # None: 1.0 depolarizing, 0.85 independent
    n_temperatures: int = 21
    burn_in: int = 0
    # 0 keeps the matcher verdicts (and the sampler seeds) as the bare
    # matching outputs; None turns on the zero-temperature tightening for both
    refine_steps: int | None = 0
    target_logical_errors: int | None = 500
    max_trials: int | None = None
    workers: int = 1

    def validate(self) -> None:
        if not self.L_values or any(L < 2 for L in self.L_values):
            raise ConfigError(f"L values must all be >= 2, got {self.L_values}")
        if not self.p_values or any(not 0.0 <= p < 0.75 for p in self.p_values):
            raise ConfigError(f"p values must lie in [0, 0.75), got {self.p_values}")
        if self.model_kind not in (DEPOLARIZING, INDEPENDENT_XZ):
            raise ConfigError(f"unsupported model kind {self.model_kind!r}")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad or not self.algorithms:
            raise ConfigError(f"unknown algorithms {bad}; choose from {ALGORITHMS}")
        if self.target_logical_errors is None and self.max_trials is None:
            raise ConfigError("need a stop rule: target_logical_errors or max_trials")
        for name, v in (
            ("target_logical_errors", self.target_logical_errors),
            ("max_trials", self.max_trials),
        ):
            if v is not None and v <= 0:
                raise ConfigError(f"{name} must be positive, got {v}")
        if self.seed is None:
            raise ConfigError("a master seed is mandatory")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.n_sample is not None and self.n_sample < 1:
            raise ConfigError(f"n_sample must be >= 1, got {self.n_sample}")
        if self.n_temperatures < 3 or self.n_temperatures % 2 == 0:
            raise ConfigError("n_temperatures must be odd and >= 3")


def make_model(kind: str, p: float) -> NoiseModel:
    """Campaign channel for one sweep point (independent noise is symmetric)."""
    if kind == DEPOLARIZING:
        return NoiseModel.depolarizing(p)
    if kind == INDEPENDENT_XZ:
        return NoiseModel.independent_xz(p, p)
    raise ConfigError(f"unsupported model kind {kind!r}")


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    frame_digest: str
    true_class: str
    verdicts: dict[str, str]
    successes: dict[str, bool]
    scores: dict[str, dict[str, float]]
    wall_time: float


@dataclass
class CampaignCell:
    L: int
    p: float
    trials: int = 0
    failures: dict[str, int] = field(default_factory=dict)
    discordant: dict[tuple[str, str], tuple[int, int]] = field(default_factory=dict)
    records: list[TrialRecord] = field(default_factory=list)
    truncated: bool = False
    wall_time: float = 0.0

    def rate(self, algorithm: str) -> float:
        return self.failures[algorithm] / self.trials if self.trials else 0.0


@dataclass
class CampaignResult:
    config: ExperimentConfig
    cells: list[CampaignCell]

    @property
    def truncated(self) -> bool:
        return any(c.truncated for c in self.cells)

    def cell(self, L: int, p: float) -> CampaignCell:
        for c in self.cells:
            if c.L == L and c.p == p:
                return c
        raise KeyError((L, p))

    def rows(self) -> list[tuple]:
        out = []
        for c in self.cells:
            for alg in self.config.algorithms:
                rate = c.rate(alg)
                lo, hi = wilson_interval(c.failures[alg], c.trials)
                out.append(
                    (c.L, c.p, self.config.model_kind, alg, c.trials,
                     c.failures[alg], rate, lo, hi, self.config.seed)
                )
        return out


@functools.lru_cache(maxsize=8)
def _cached_layout(L: int) -> CodeLayout:
    return build_layout(L)


def _frame_digest(frame: PauliFrame) -> str:
    h = hashlib.blake2b(digest_size=8)
    nbytes = (frame.n_qubits + 7) // 8
    h.update(frame.x.to_bytes(nbytes, "little"))
    h.update(frame.z.to_bytes(nbytes, "little"))
    return h.hexdigest()


@dataclass(frozen=True)
class _CellSpec:
    """Picklable per-cell work description for the trial workers."""

    L: int
    p: float
    model_kind: str
    algorithms: tuple[str, ...]
    n_sample: int
    beta_star: float | None  # None when beta_bar is undefined (p = 0)
    n_temperatures: int
    burn_in: int
    refine_steps: int | None
    seed: int
    cell_index: int


def _run_one_trial(spec: _CellSpec, trial: int) -> TrialRecord:
    t0 = time.perf_counter()
    layout = _cached_layout(spec.L)
    model = make_model(spec.model_kind, spec.p)
    rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(spec.seed, spawn_key=(spec.cell_index, trial, 0)))
    )
    frame = sample_frame(model, layout, rng)
    true_cls = layout.class_of(frame)
    syndrome = layout.syndrome_of(frame)

    need_enhanced = any(a != STANDARD for a in spec.algorithms)
    verdicts: dict[str, str] = {}
    scores: dict[str, dict[str, float]] = {}
    chain_set: ClassChainSet | None = None
    if need_enhanced:
        std_verdict, enh_verdict, chain_set = decode_both(
            layout, syndrome, model, refine_steps=spec.refine_steps
        )
    else:
        std_verdict = decode_standard(layout, syndrome, model)
        enh_verdict = None

    def put(alg, verdict):
        verdicts[alg] = verdict.cls.label
        scores[alg] = {c.label: float(v) for c, v in verdict.scores.items()}

    for alg in spec.algorithms:
        if alg == STANDARD:
            put(alg, std_verdict)
        elif alg == ENHANCED:
            put(alg, enh_verdict)
        elif alg in (SINGLE_TEMP, FREE_ENERGY):
            if spec.beta_star is None:
                # noiseless channel: the posterior is a point mass and sampling
                # is undefined, so the matcher verdict stands
                put(alg, enh_verdict)
                continue
            seed_seq = np.random.SeedSequence(
                spec.seed,
                spawn_key=(spec.cell_index, trial, 1 if alg == SINGLE_TEMP else 2),
            )
            if alg == SINGLE_TEMP:
                cfg = SingleTempConfig(spec.beta_star, spec.n_sample, spec.burn_in)
                put(alg, decode_single_temperature(layout, syndrome, model, cfg, chain_set, seed_seq))
            else:
                temps = free_energy_temperatures(model, spec.n_temperatures)
                put(alg, decode_free_energy(
                    layout, syndrome, model, temps, spec.n_sample, chain_set, seed_seq
                ))
    successes = {alg: verdicts[alg] == true_cls.label for alg in spec.algorithms}
    return TrialRecord(
        trial, _frame_digest(frame), true_cls.label, verdicts, successes, scores,
        time.perf_counter() - t0,
    )


def _run_trial_batch(spec: _CellSpec, start: int, count: int) -> list[TrialRecord]:
    return [_run_one_trial(spec, t) for t in range(start, start + count)]


def _merge_batch(cell: CampaignCell, algs: tuple[str, ...], batch: list[TrialRecord],
                 keep_trials: bool) -> None:
    for rec in batch:
        cell.trials += 1
        for alg in algs:
            if not rec.successes[alg]:
                cell.failures[alg] += 1
        for i, a in enumerate(algs):
            for b in algs[i + 1:]:
                fa, fb = cell.discordant[(a, b)]
                if not rec.successes[a] and rec.successes[b]:
                    fa += 1
                elif rec.successes[a] and not rec.successes[b]:
                    fb += 1
                cell.discordant[(a, b)] = (fa, fb)
        if keep_trials:
            cell.records.append(rec)


def _cell_spec(cfg: ExperimentConfig, cell_index: int, L: int, p: float) -> _CellSpec:
    model = make_model(cfg.model_kind, p)
    factor = cfg.beta_star_factor
    if factor is None:
        factor = 0.85 if cfg.model_kind == INDEPENDENT_XZ else 1.0
    try:
        beta_star = factor * beta_bar(model)
    except InvalidParameterError:
        beta_star = None
    return _CellSpec(
        L=L, p=p, model_kind=cfg.model_kind, algorithms=cfg.algorithms,
        n_sample=cfg.n_sample if cfg.n_sample is not None else L ** 4,
        beta_star=beta_star, n_temperatures=cfg.n_temperatures,
        burn_in=cfg.burn_in, refine_steps=cfg.refine_steps,
        seed=cfg.seed, cell_index=cell_index,
    )


def _stop_reached(cfg: ExperimentConfig, cell: CampaignCell) -> bool:
    if cfg.max_trials is not None and cell.trials >= cfg.max_trials:
        return True
    if cfg.target_logical_errors is not None:
        # paired mode: run until the slowest algorithm reaches the target
        if min(cell.failures[a] for a in cfg.algorithms) >= cfg.target_logical_errors:
            return True
    return False


def run_campaign(cfg: ExperimentConfig, keep_trials: bool = False) -> CampaignResult:
    """Run the sweep; deterministic in (config, seed), whatever the worker count."""
    cfg.validate()
    workers = int(os.environ.get(WORKERS_ENV_VAR, cfg.workers))
    cells: list[CampaignCell] = []
    cell_index = 0
    executor = None
    if workers > 1:
        executor = concurrent.futures.ProcessPoolExecutor(max_workers=workers)
    try:
        for L in cfg.L_values:
            for p in cfg.p_values:
                spec = _cell_spec(cfg, cell_index, L, p)
                cell = CampaignCell(L=L, p=p)
                cell.failures = {a: 0 for a in cfg.algorithms}
                cell.discordant = {
                    (a, b): (0, 0)
                    for i, a in enumerate(cfg.algorithms)
                    for b in cfg.algorithms[i + 1:]
                }
                t0 = time.perf_counter()
                try:
                    next_trial = 0

                    def batch_size(start: int) -> int:
                        if cfg.max_trials is None:
                            return _BATCH_SIZE
                        return max(0, min(_BATCH_SIZE, cfg.max_trials - start))

                    while not _stop_reached(cfg, cell):
                        starts = [next_trial + k * _BATCH_SIZE for k in range(max(1, workers))]
                        sizes = [batch_size(s) for s in starts]
                        if executor is None:
                            batches = [_run_trial_batch(spec, starts[0], sizes[0])]
                        else:
                            batches = list(
                                executor.map(_run_trial_batch, [spec] * len(starts), starts, sizes)
                            )
                        for batch in batches:  # merged in trial-id order
                            _merge_batch(cell, cfg.algorithms, batch, keep_trials)
                            next_trial += _BATCH_SIZE
                            if _stop_reached(cfg, cell):
                                break
                except KeyboardInterrupt:
                    cell.truncated = True
                    cell.wall_time = time.perf_counter() - t0
                    cells.append(cell)
                    raise _CampaignInterrupted(CampaignResult(cfg, cells))
                cell.wall_time = time.perf_counter() - t0
                cells.append(cell)
                cell_index += 1
    finally:
        if executor is not None:
            executor.shutdown()
    return CampaignResult(cfg, cells)


class _CampaignInterrupted(Exception):
    """Carries partial results out of an interrupted campaign."""

    def __init__(self, result: CampaignResult):
        self.result = result
        super().__init__("campaign interrupted")


def paired_comparison_pvalue(
    cell: CampaignCell, candidate: str, references: tuple[str, ...]
) -> tuple[str, float]:
    """One-sided evidence that the candidate's rate is below the best reference's.

    The reference with the lowest observed rate is tested (the hardest bar);
    returns (chosen reference, exact McNemar p-value).
    """
    ref = min(references, key=lambda a: (cell.failures[a], a))
    key = (candidate, ref) if (candidate, ref) in cell.discordant else (ref, candidate)
    a, b = cell.discordant[key]
    cand_only, ref_only = (a, b) if key[0] == candidate else (b, a)
    return ref, mcnemar_one_sided_pvalue(n_favor=ref_only, n_against=cand_only)


# ---------------------------------------------------------------------------
# CSV and plot-data output


def format_results_csv(result: CampaignResult) -> str:
    lines = [CSV_HEADER]
    for row in result.rows():
        L, p, model, alg, trials, failures, rate, lo, hi, seed = row
        lines.append(
            f"{L},{p!r},{model},{alg},{trials},{failures},{rate!r},{lo!r},{hi!r},{seed}"
        )
    if result.truncated:
        lines.append(TRUNCATION_MARKER)
    return "\n".join(lines) + "\n"


def write_results_csv(result: CampaignResult, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_results_csv(result))


def parse_results_csv(path: str) -> list[tuple]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip()
        if header != CSV_HEADER:
            raise ConfigError(f"unexpected CSV header {header!r}")
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            f = line.split(",")
            rows.append(
                (int(f[0]), float(f[1]), f[2], f[3], int(f[4]), int(f[5]),
                 float(f[6]), float(f[7]), float(f[8]), int(f[9]))
            )
    return rows


def write_plot_data(result: CampaignResult, directory: str) -> list[str]:
    """Two-column rate-ratio files (standard MWPM rate over each algorithm's),
    one file per (L, algorithm) pair, in the style of the ratio figures."""
    if STANDARD not in result.config.algorithms:
        return []
    os.makedirs(directory, exist_ok=True)
    written = []
    for L in result.config.L_values:
        for alg in result.config.algorithms:
            if alg == STANDARD:
                continue
            path = os.path.join(directory, f"ratio_standard_over_{alg}_L{L}.dat")
            with open(path, "w", encoding="utf-8") as fh:
                for p in result.config.p_values:
                    cell = result.cell(L, p)
                    r_std, r_alg = cell.rate(STANDARD), cell.rate(alg)
                    ratio = r_std / r_alg if r_alg > 0 else math.inf
                    fh.write(f"{p!r} {ratio!r}\n")
            written.append(path)
    return written


# ---------------------------------------------------------------------------
# deterministic fatal-pattern suite


@dataclass(frozen=True)
class FatalPatternCase:
    L: int
    name: str
    standard_correct: bool
    enhanced_correct: bool
    expected_standard: bool
    expected_enhanced: bool

    @property
    def passed(self) -> bool:
        return (self.standard_correct == self.expected_standard
                and self.enhanced_correct == self.expected_enhanced)


@dataclass(frozen=True)
class FatalPatternReport:
    cases: tuple[FatalPatternCase, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.cases)

    def summary(self) -> str:
        lines = []
        for c in self.cases:
            lines.append(
                f"L={c.L} {c.name}: standard {'ok' if c.standard_correct else 'WRONG'} "
                f"(expected {'ok' if c.expected_standard else 'WRONG'}), "
                f"enhanced {'ok' if c.enhanced_correct else 'WRONG'} "
                f"(expected {'ok' if c.expected_enhanced else 'WRONG'}) -> "
                f"{'PASS' if c.passed else 'FAIL'}"
            )
        return "\n".join(lines)


def build_half_chain(layout: CodeLayout, length: int, y_at: int | None = None) -> PauliFrame:
    """Bit-flip chain growing inward from the high boundary in the center column.

    ``y_at`` marks one chain qubit (index counted from the boundary) as a
    sigma-y instead of a sigma-x.
    """
    L = layout.L
    col = L - 1 if (L - 1) % 2 == 0 else L - 2
    rows = [layout.span - 2 * k for k in range(length)]
    frame = layout.identity_frame()
    for k, r in enumerate(rows):
        q = layout.qubit_index[(r, col)]
        frame.set_pauli(q, "Y" if k == y_at else "X")
    return frame


def fatal_pattern_suite(L_values: tuple[int, ...], p: float = 0.1) -> FatalPatternReport:
    """Deterministic low-rate separation tests on half-code bit-flip chains.

    A pure chain of (L+1)/2 flips fools both matchers (they prefer the
    (L-1)/2 completion on the wrong side); marking one interior flip as a
    sigma-y leaves phase-flip anyons along the line, which the class-forced
    decoder uses to recover the true class while plain matching still fails.
    """
    cases = []
    model = make_model(DEPOLARIZING, p)
    for L in L_values:
        if L % 2 == 0 or L < 3:
            raise InvalidParameterError(f"fatal patterns need odd L >= 3, got {L}")
        layout = _cached_layout(L)
        long_len = (L + 1) // 2
        patterns = (
            ("y_marked_half_chain", build_half_chain(layout, long_len, y_at=long_len // 2),
             False, True),
            ("pure_x_half_chain", build_half_chain(layout, long_len), False, False),
            ("short_chain", build_half_chain(layout, (L - 1) // 2), True, True),
        )
        for name, frame, expect_std, expect_enh in patterns:
            true_cls = layout.class_of(frame)
            syndrome = layout.syndrome_of(frame)
            std = decode_standard(layout, syndrome, model)
            enh, _ = decode_enhanced(layout, syndrome, model)
            cases.append(FatalPatternCase(
                L, name,
                std.cls == true_cls, enh.cls == true_cls,
                expect_std, expect_enh,
            ))
    return FatalPatternReport(tuple(cases))


# ---------------------------------------------------------------------------
# oracle agreement check (small codes)


@dataclass(frozen=True)
class OracleCheckResult:
    n_syndromes: int
    agreement: float        # fraction where the sampler matches the oracle
    oracle_success: float   # the oracle's own success rate against the truth
    sampler_success: float
    pass_bar: float         # lower 95% bound of the measured oracle success
    passed: bool

    def summary(self) -> str:
        return (
            f"agreement(single-temperature, oracle) = {self.agreement:.4f} over "
            f"{self.n_syndromes} syndromes; oracle success = {self.oracle_success:.4f} "
            f"(pass bar {self.pass_bar:.4f}), single-temperature success = "
            f"{self.sampler_success:.4f} -> {'PASS' if self.passed else 'FAIL'}"
        )


def oracle_check(
    L: int = 3,
    p: float = 0.1,
    n_syndromes: int = 300,
    n_sample_factor: int = 10,
    seed: int = 2024,
) -> OracleCheckResult:
    """Compare the single-temperature decoder against exact enumeration.

    The pass bar is self-calibrating: the sampler must agree with the oracle
    at least as often as the oracle itself matches the sampled truth (a
    near-optimal decoder tracks the oracle's verdicts more closely than those
    verdicts track the random truth), with the bar set at the lower 95%
    confidence bound of the measured oracle success rate.
    """
    layout = _cached_layout(L)
    model = make_model(DEPOLARIZING, p)
    cfg = SingleTempConfig(beta_bar(model), n_sample_factor * L ** 4)
    agree = oracle_ok = sampler_ok = 0
    for i in range(n_syndromes):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(i, 0)))
        )
        frame = sample_frame(model, layout, rng)
        true_cls = layout.class_of(frame)
        syndrome = layout.syndrome_of(frame)
        _, chain_set = decode_enhanced(layout, syndrome, model)
        verdict = decode_single_temperature(
            layout, syndrome, model, cfg, chain_set,
            np.random.SeedSequence(seed, spawn_key=(i, 1)),
        )
        oracle_cls = exact_decoder(layout, syndrome, model)
        agree += verdict.cls == oracle_cls
        oracle_ok += oracle_cls == true_cls
        sampler_ok += verdict.cls == true_cls
    s = oracle_ok / n_syndromes
    bar = s - 1.96 * math.sqrt(s * (1.0 - s) / n_syndromes)
    return OracleCheckResult(
        n_syndromes,
        agree / n_syndromes,
        s,
        sampler_ok / n_syndromes,
        pass_bar=bar,
        passed=agree / n_syndromes >= bar,
    )


# ---------------------------------------------------------------------------
# n_sample scaling probe


@dataclass(frozen=True)
class ScalingProbePoint:
    L: int
    n_sample: int | None   # minimal n_sample certifying parity, None if unresolved
    lower_bound: int
    upper_bound: int | None

    @property
    def resolved(self) -> bool:
        return self.n_sample is not None


@dataclass(frozen=True)
class ScalingProbeResult:
    p: float
    points: tuple[ScalingProbePoint, ...]
    exponent: float | None  # log-log fit over resolved points, None if refused

    def summary(self) -> str:
        lines = [f"scaling probe at p={self.p}"]
        for pt in self.points:
            if pt.resolved:
                lines.append(f"L={pt.L}: n_sample* = {pt.n_sample}")
            else:
                lines.append(
                    f"L={pt.L}: unresolved (bounds [{pt.lower_bound}, {pt.upper_bound}])"
                )
        lines.append(
            f"log-log exponent: {self.exponent:.3f}" if self.exponent is not None
            else "log-log exponent: refused (need >= 2 resolved sizes)"
        )
        return "\n".join(lines)


def _probe_certifies(cfg: ExperimentConfig, L: int, p: float, n_sample: int,
                     alpha: float) -> bool:
    result = run_campaign(replace(cfg, L_values=(L,), p_values=(p,), n_sample=n_sample))
    cell = result.cell(L, p)
    _, pvalue = paired_comparison_pvalue(cell, SINGLE_TEMP, (STANDARD, ENHANCED))
    return pvalue <= alpha


def scaling_probe(
    p: float,
    L_values: tuple[int, ...],
    seed: int,
    confidence: float = 0.95,
    target_errors: int = 200,
    max_trials: int = 50_000,
    max_n_sample: int | None = None,
) -> ScalingProbeResult:
    """Binary-search the minimal n_sample at which the single-temperature
    decoder provably beats the better matcher, then fit the growth exponent."""
    alpha = 1.0 - confidence
    base = ExperimentConfig(
        L_values=(L_values[0],), p_values=(p,), seed=seed,
        algorithms=(STANDARD, ENHANCED, SINGLE_TEMP),
        target_logical_errors=target_errors, max_trials=max_trials,
    )
    points = []
    for L in L_values:
        cap = max_n_sample if max_n_sample is not None else 4 * L ** 4
        lo, hi = 1, None
        n = 1
        while n <= cap:
            if _probe_certifies(base, L, p, n, alpha):
                hi = n
                break
            lo = n
            n *= 2
        if hi is None:
            points.append(ScalingProbePoint(L, None, lo, None))
            continue
        while hi - lo > max(1, lo // 8):
            mid = (lo + hi) // 2
            if _probe_certifies(base, L, p, mid, alpha):
                hi = mid
            else:
                lo = mid
        points.append(ScalingProbePoint(L, hi, lo, hi))
    resolved = [pt for pt in points if pt.resolved]
    exponent = None
    if len(resolved) >= 2:
        xs = np.log([pt.L for pt in resolved])
        ys = np.log([pt.n_sample for pt in resolved])
        exponent = float(np.polyfit(xs, ys, 1)[0])
    return ScalingProbeResult(p, tuple(points), exponent)


def distinguishability_scan(
    p: float,
    L_values: tuple[int, ...],
    n_syndromes: int,
    seed: int,
    n_sample: int | None = None,
) -> dict[int, float]:
    """Mean single-temperature distinguishability gap per code size."""
    model = make_model(DEPOLARIZING, p)
    out = {}
    for L in L_values:
        layout = _cached_layout(L)
        cfg = SingleTempConfig(beta_bar(model), n_sample if n_sample else L ** 4)
        gaps = []
        for i in range(n_syndromes):
            rng = np.random.Generator(
                np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(L, i, 0)))
            )
            frame = sample_frame(model, layout, rng)
            syndrome = layout.syndrome_of(frame)
            _, chain_set = decode_enhanced(layout, syndrome, model)
            verdict = decode_single_temperature(
                layout, syndrome, model, cfg, chain_set,
                np.random.SeedSequence(seed, spawn_key=(L, i, 1)),
            )
            gaps.append(distinguishability(verdict.scores, layout.class_of(frame)))
        out[L] = float(np.mean(gaps))
    return out
