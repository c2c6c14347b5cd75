"""Monte Carlo harness and statistical comparison against the exact formulas.

Replica execution is deterministic: replica r of a run with master seed s
always uses stream (s, r), and merged results are sorted by replica index,
so any thread count or merge order yields the same SampleSet.
"""

from __future__ import annotations

import json
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .errors import InsufficientDegree, InsufficientSamples, MismatchedSupport, ParameterOutOfRange
from .graph import MultiGraph, degree_histogram
from .growth import GrowthConfig, grow_kneighbour
from .pmf import DegreePmf
from .rng import RngStream
from .tolerances import TOL

TRACED_DEGREE = "traced_degree"
DEGREE_HISTOGRAM = "degree_histogram"
STEP_INCREMENTS = "step_increments"


@dataclass
class SampleSet:
    """Replica observations plus everything needed to reproduce them."""

    model: str
    kind: str
    config: dict
    master_seed: int
    stream_ids: np.ndarray
    observations: list | np.ndarray

    @property
    def replicas(self) -> int:
        return len(self.stream_ids)

    def traced(self) -> np.ndarray:
        if self.kind != TRACED_DEGREE:
            raise ParameterOutOfRange(f"sample set holds {self.kind}, not traced degrees")
        return self.observations


@dataclass
class ComparisonReport:
    """Outcome of one empirical-vs-exact comparison."""

    name: str
    empirical: float
    exact: float
    tolerance: float
    verdict: str
    std_error: float | None = None
    metadata: dict = field(default_factory=dict)
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def _verdict(ok: bool) -> str:
    return "pass" if ok else "fail"


# -- replica execution --------------------------------------------------------


def run_replicas(cfg: GrowthConfig, R: int, parallelism: int = 1) -> SampleSet:
    """R independent growth runs, replica r on stream (master seed, r).

    Records the traced vertex's final degree when the config traces one,
    otherwise each replica's full degree histogram.
    """
    if R < 1:
        raise ParameterOutOfRange(f"R must be >= 1, got {R}")
    master = cfg.rng.seed
    echo = _config_echo(cfg, R)
    if cfg.trace_vertex and cfg.neighbour_mode == "slots":
        pairs = cfg.seed.edge_pairs()
        us = np.array([u for u, _ in pairs], dtype=np.int64)
        vs = np.array([v for _, v in pairs], dtype=np.int64)
        t0 = cfg.seed.n_vertices
        out = np.empty(R, dtype=np.int64)

        def chunk(s0: int, s1: int) -> None:
            _kernels._final_degree_batch(
                us, vs, t0, cfg.n, cfg.k, cfg.trace_vertex, master, s0, s1, out[s0:s1]
            )

        _run_chunked(chunk, R, parallelism)
        if (out < 0).any():
            raise InsufficientDegree("a replica hit a first-choice vertex with too few slots")
        return SampleSet("k-neighbour", TRACED_DEGREE, echo, master, np.arange(R), out)

    observations = [None] * R

    def replica(r: int) -> None:
        rcfg = GrowthConfig(
            k=cfg.k,
            n=cfg.n,
            rng=RngStream(master, r),
            seed=cfg.seed,
            trace_vertex=cfg.trace_vertex,
            neighbour_mode=cfg.neighbour_mode,
        )
        result = grow_kneighbour(rcfg)
        if cfg.trace_vertex:
            observations[r] = int(result.graph.degree(cfg.trace_vertex))
        else:
            observations[r] = np.bincount(result.graph.degrees())

    _run_indexed(replica, R, parallelism)
    kind = TRACED_DEGREE if cfg.trace_vertex else DEGREE_HISTOGRAM
    if cfg.trace_vertex:
        observations = np.array(observations, dtype=np.int64)
    return SampleSet("k-neighbour", kind, echo, master, np.arange(R), observations)


def merge_sample_sets(a: SampleSet, b: SampleSet) -> SampleSet:
    """Associative, commutative merge of disjoint replica ranges."""
    if (a.model, a.kind, a.master_seed) != (b.model, b.kind, b.master_seed):
        raise ParameterOutOfRange("sample sets come from different experiments")
    if np.intersect1d(a.stream_ids, b.stream_ids).size:
        raise ParameterOutOfRange("sample sets overlap in replica indices")
    ids = np.concatenate([a.stream_ids, b.stream_ids])
    order = np.argsort(ids)
    if isinstance(a.observations, np.ndarray) and a.observations.ndim == 1:
        obs = np.concatenate([a.observations, b.observations])[order]
    else:
        merged = list(a.observations) + list(b.observations)
        obs = [merged[i] for i in order]
    return SampleSet(a.model, a.kind, dict(a.config), a.master_seed, ids[order], obs)


def _run_chunked(chunk: Callable[[int, int], None], R: int, parallelism: int) -> None:
    if parallelism <= 1:
        chunk(0, R)
        return
    bounds = np.linspace(0, R, parallelism + 1, dtype=int)
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        futures = [
            pool.submit(chunk, int(s0), int(s1))
            for s0, s1 in zip(bounds[:-1], bounds[1:])
            if s1 > s0
        ]
        for f in futures:
            f.result()


def _run_indexed(fn: Callable[[int], None], R: int, parallelism: int) -> None:
    if parallelism <= 1:
        for r in range(R):
            fn(r)
        return
    with ThreadPoolExecutor(max_workers=parallelism) as pool:
        for _ in pool.map(fn, range(R)):
            pass


def _config_echo(cfg: GrowthConfig, R: int) -> dict:
    return {
        "k": cfg.k,
        "n": cfg.n,
        "seed_variant": cfg.seed.variant,
        "seed_j": cfg.seed.j,
        "trace_vertex": cfg.trace_vertex,
        "neighbour_mode": cfg.neighbour_mode,
        "replicas": R,
        "master_seed": cfg.rng.seed,
    }


# -- distances ----------------------------------------------------------------


def tv_distance(p: dict, q: dict):
    """Half the L1 distance between two probability tables."""
    support = set(p) | set(q)
    total = sum(abs(p.get(v, 0) - q.get(v, 0)) for v in support)
    return total / 2


def chi_square_statistic(counts: dict, expected: dict, R: int) -> float:
    """Secondary diagnostic: sum (observed - expected)^2 / expected."""
    stat = 0.0
    for v, pe in expected.items():
        if pe > 0:
            e = float(pe) * R
            o = counts.get(v, 0)
            stat += (o - e) ** 2 / e
    return stat


def empirical_distribution(values: np.ndarray) -> dict[int, float]:
    uniq, counts = np.unique(np.asarray(values), return_counts=True)
    n = counts.sum()
    return {int(v): c / n for v, c in zip(uniq, counts)}


def expected_sampling_tv(probs: dict, R: int, rng: np.random.Generator, two_sample: bool) -> float:
    """Bootstrap estimate of E[TV] due to sampling alone at replica count R."""
    values = sorted(probs)
    p = np.array([float(probs[v]) for v in values])
    p = p / p.sum()
    acc = 0.0
    for _ in range(TOL.bootstrap_iterations):
        a = rng.multinomial(R, p) / R
        b = rng.multinomial(R, p) / R if two_sample else p
        acc += 0.5 * np.abs(a - b).sum()
    return acc / TOL.bootstrap_iterations


# -- comparisons --------------------------------------------------------------


def compare_degree_distribution(
    s: SampleSet, exact: DegreePmf, tolerance: float | None = None
) -> ComparisonReport:
    """TV between the empirical traced-degree table and an exact pmf.

    Mass observed outside the exact support is reported (warning) and counts
    fully toward the distance.  The verdict needs both the TV within the
    tolerance (default: sampling_tv_factor times the bootstrap sampling TV)
    and the sample mean within clt_sigmas standard errors.
    """
    values = s.traced()
    R = values.size
    emp = empirical_distribution(values)
    exact_table = {int(v): float(p) for v, p in exact.items()}
    outside = sum(p for v, p in emp.items() if v not in exact_table)
    if outside:
        warnings.warn(
            f"{outside:.3g} empirical mass outside the exact support",
            MismatchedSupport,
            stacklevel=2,
        )
    tv = float(tv_distance(emp, exact_table))
    if tolerance is None:
        boot = np.random.default_rng(s.master_seed ^ 0xB007)
        tolerance = TOL.sampling_tv_factor * expected_sampling_tv(
            exact_table, R, boot, two_sample=False
        )
    mean_emp = float(values.mean())
    mean_exact = float(exact.mean())
    se = float(values.std(ddof=1)) / np.sqrt(R) if R > 1 else float("inf")
    var_emp = float(values.var(ddof=1)) if R > 1 else 0.0
    mean_ok = abs(mean_emp - mean_exact) <= TOL.clt_sigmas * se
    report = ComparisonReport(
        name="degree-distribution-tv",
        empirical=tv,
        exact=0.0,
        tolerance=float(tolerance),
        verdict=_verdict(tv <= tolerance and mean_ok),
        std_error=se,
        metadata={
            "R": R,
            "mean_empirical": mean_emp,
            "mean_exact": mean_exact,
            "variance_empirical": var_emp,
            "variance_exact": float(exact.variance()),
            "mass_outside_support": float(outside),
            "chi_square": chi_square_statistic(
                {int(v): int(c) for v, c in zip(*np.unique(values, return_counts=True))},
                exact_table,
                R,
            ),
            **s.config,
        },
    )
    return report


def compare_mean_degree(s: SampleSet, exact_mean) -> ComparisonReport:
    """Sample mean of the traced degree against its exact expectation."""
    values = s.traced()
    R = values.size
    mean_emp = float(values.mean())
    se = float(values.std(ddof=1)) / np.sqrt(R)
    ok = abs(mean_emp - float(exact_mean)) <= TOL.clt_sigmas * se
    return ComparisonReport(
        name="mean-degree",
        empirical=mean_emp,
        exact=float(exact_mean),
        tolerance=TOL.clt_sigmas * se,
        verdict=_verdict(ok),
        std_error=se,
        metadata={"R": R, "sigmas": TOL.clt_sigmas, **s.config},
    )


def compare_degree_sequence(
    g: MultiGraph, k: int, d_max: int, epsilon: float = TOL.degree_seq_rel
) -> ComparisonReport:
    """N_n(d)/n for d in [k, d_max] against the limiting proportions."""
    from .urn import alpha_degree_seq

    hist = degree_histogram(g)
    n = g.vertex_count
    rows = []
    worst = 0.0
    for d in range(k, d_max + 1):
        limit = float(alpha_degree_seq(k, d))
        emp = hist.get(d, 0) / n
        rel = abs(emp - limit) / limit
        worst = max(worst, rel)
        rows.append(
            {"d": d, "empirical": emp, "exact": limit, "rel_deviation": rel,
             "verdict": _verdict(rel <= epsilon)}
        )
    return ComparisonReport(
        name="degree-sequence",
        empirical=worst,
        exact=0.0,
        tolerance=epsilon,
        verdict=_verdict(worst <= epsilon),
        metadata={"k": k, "n": n, "d_range": [k, d_max]},
        rows=rows,
    )


def median_degree_sequence_report(
    graphs: Sequence[MultiGraph], k: int, d_max: int, epsilon: float = TOL.degree_seq_rel
) -> ComparisonReport:
    """Per-degree median of several runs' proportions against the limits."""
    from .urn import alpha_degree_seq

    n = graphs[0].vertex_count
    hists = [degree_histogram(g) for g in graphs]
    rows = []
    worst = 0.0
    for d in range(k, d_max + 1):
        limit = float(alpha_degree_seq(k, d))
        med = float(np.median([h.get(d, 0) / n for h in hists]))
        rel = abs(med - limit) / limit
        worst = max(worst, rel)
        rows.append(
            {"d": d, "empirical": med, "exact": limit, "rel_deviation": rel,
             "verdict": _verdict(rel <= epsilon)}
        )
    return ComparisonReport(
        name="degree-sequence-median",
        empirical=worst,
        exact=0.0,
        tolerance=epsilon,
        verdict=_verdict(worst <= epsilon),
        metadata={"k": k, "n": n, "runs": len(graphs), "d_range": [k, d_max]},
        rows=rows,
    )


# -- single-step increment statistics ------------------------------------------


def collect_step_increments(
    cfg: GrowthConfig, d_values: Sequence[int], trials: int, n_graphs: int = 8
) -> SampleSet:
    """Virtual-step increment counts at fixed time n, over frozen graphs.

    Grows n_graphs replicas, then fires `trials` candidate steps at each
    without mutating it, counting per-degree gain-exactly-1 and gain-2-plus
    events.  Conditioning events for degree d accumulate as (number of
    degree-d vertices) x trials per graph.
    """
    if cfg.neighbour_mode != "slots":
        raise ParameterOutOfRange("step-increment sampling implements the slot model")
    d_sorted = np.array(sorted(set(int(d) for d in d_values)), dtype=np.int64)
    gain1 = np.zeros(d_sorted.size, dtype=np.int64)
    gain_multi = np.zeros(d_sorted.size, dtype=np.int64)
    birth_not_k = np.zeros(1, dtype=np.int64)
    events = np.zeros(d_sorted.size, dtype=np.int64)
    master = cfg.rng.seed
    per_graph = trials // n_graphs
    for r in range(n_graphs):
        rng = RngStream(master, r)
        result = grow_kneighbour(
            GrowthConfig(k=cfg.k, n=cfg.n, rng=rng, seed=cfg.seed)
        )
        g = result.graph
        counts = np.bincount(g.degrees(), minlength=int(d_sorted.max()) + 1)
        events += counts[d_sorted] * per_graph
        _kernels._step_increment_trials(
            g._eea, g._prev, g._head, g._deg, 2 * g.num_edges, cfg.k,
            per_graph, rng.state, d_sorted, gain1, gain_multi, birth_not_k,
        )
    return SampleSet(
        model="k-neighbour",
        kind=STEP_INCREMENTS,
        config={**_config_echo(cfg, n_graphs), "trials": trials, "d_values": d_sorted.tolist()},
        master_seed=master,
        stream_ids=np.arange(n_graphs),
        observations={
            "d_values": d_sorted,
            "events": events,
            "gain1": gain1,
            "gain_multi": gain_multi,
            "birth_not_k": int(birth_not_k[0]),
            "n": cfg.n,
            "k": cfg.k,
        },
    )


def check_pa_class(snapshots: SampleSet, d_values: Sequence[int] | None = None) -> ComparisonReport:
    """Per-degree single-step attachment rates against d/(2n).

    Checks P(gain exactly 1 | degree d) within clt_sigmas binomial standard
    deviations of d/(2n), the gain-2-plus frequency against the
    multi_increment_envelope * d^2/n^2 envelope, and that no candidate step
    was born with degree other than k.
    """
    if snapshots.kind != STEP_INCREMENTS:
        raise ParameterOutOfRange("check_pa_class needs step-increment snapshots")
    obs = snapshots.observations
    n = obs["n"]
    requested = [int(d) for d in (d_values if d_values is not None else obs["d_values"])]
    rows = []
    all_ok = obs["birth_not_k"] == 0
    worst_rel = 0.0
    for d in requested:
        idx = int(np.searchsorted(obs["d_values"], d))
        if idx >= obs["d_values"].size or obs["d_values"][idx] != d:
            raise ParameterOutOfRange(f"degree {d} was not sampled")
        ev = int(obs["events"][idx])
        if ev < TOL.min_conditioning_events:
            raise InsufficientSamples(
                f"degree {d}: {ev} conditioning events, need {TOL.min_conditioning_events}"
            )
        p0 = d / (2 * n)
        rate1 = obs["gain1"][idx] / ev
        sd = np.sqrt(p0 * (1 - p0) / ev)
        ok1 = abs(rate1 - p0) <= TOL.clt_sigmas * sd
        envelope = TOL.multi_increment_envelope * d * d / (n * n)
        rate_multi = obs["gain_multi"][idx] / ev
        ok2 = rate_multi <= envelope
        all_ok = all_ok and ok1 and ok2
        worst_rel = max(worst_rel, abs(rate1 - p0) / (TOL.clt_sigmas * sd))
        rows.append(
            {
                "d": d,
                "events": ev,
                "rate_gain1": float(rate1),
                "expected": p0,
                "band": float(TOL.clt_sigmas * sd),
                "rate_gain_multi": float(rate_multi),
                "multi_envelope": envelope,
                "verdict": _verdict(ok1 and ok2),
            }
        )
    return ComparisonReport(
        name="pa-class-conditions",
        empirical=worst_rel,
        exact=0.0,
        tolerance=1.0,
        verdict=_verdict(all_ok),
        metadata={
            "n": n,
            "k": obs["k"],
            "birth_not_k": obs["birth_not_k"],
            "trials": snapshots.config["trials"],
        },
        rows=rows,
    )


# -- cross-model comparison -----------------------------------------------------


def compare_models_tv(
    k: int, i: int, n: int, R: int, master_seed: int = 0, parallelism: int = 1,
    tolerance: float | None = None,
) -> ComparisonReport:
    """TV between traced-degree samples of the two growth models.

    Passes when the distance is within sampling_tv_factor times the
    bootstrap-expected two-sample TV at replica count R (or the explicit
    tolerance).  Replicas use streams [0, R) for the k-neighbour model and
    [R, 2R) for the contracted single-edge model.
    """
    if i < 2:
        raise ParameterOutOfRange(f"compare_models_tv needs i >= 2, got {i}")
    from .growth import SeedGraph

    seed = SeedGraph.k_loops(k)
    pairs = seed.edge_pairs()
    us = np.array([u for u, _ in pairs], dtype=np.int64)
    vs = np.array([v for _, v in pairs], dtype=np.int64)
    kneigh = np.empty(R, dtype=np.int64)
    lcd = np.empty(R, dtype=np.int64)

    def chunk_kneigh(s0: int, s1: int) -> None:
        _kernels._final_degree_batch(us, vs, 1, n, k, i, master_seed, s0, s1, kneigh[s0:s1])

    def chunk_lcd(s0: int, s1: int) -> None:
        _kernels._lcd_block_degree_batch(k, n, i, master_seed, R + s0, R + s1, lcd[s0:s1])

    _run_chunked(chunk_kneigh, R, parallelism)
    _run_chunked(chunk_lcd, R, parallelism)
    pk = empirical_distribution(kneigh)
    pl = empirical_distribution(lcd)
    tv = float(tv_distance(pk, pl))
    pooled = empirical_distribution(np.concatenate([kneigh, lcd]))
    boot = np.random.default_rng(master_seed ^ 0x7007)
    sampling_tv = expected_sampling_tv(pooled, R, boot, two_sample=True)
    if tolerance is None:
        tolerance = TOL.sampling_tv_factor * sampling_tv
    return ComparisonReport(
        name="models-tv",
        empirical=tv,
        exact=0.0,
        tolerance=float(tolerance),
        verdict=_verdict(tv <= tolerance),
        metadata={
            "k": k,
            "i": i,
            "n": n,
            "R": R,
            "master_seed": master_seed,
            "expected_sampling_tv": float(sampling_tv),
            "mean_kneighbour": float(kneigh.mean()),
            "mean_lcd": float(lcd.mean()),
        },
    )


# -- retries ---------------------------------------------------------------------


def majority_vote(
    check: Callable[[int], ComparisonReport], seeds: Sequence[int] | None = None
) -> tuple[ComparisonReport, list[ComparisonReport]]:
    """Rerun a statistical check with fresh seeds; the majority decides.

    Returns the deciding report (the last run) with its verdict replaced by
    the majority outcome, plus every individual report.
    """
    seeds = list(seeds or range(TOL.statistical_retries))
    if len(seeds) % 2 == 0:
        raise ParameterOutOfRange("majority voting needs an odd number of seeds")
    reports = []
    passes = fails = 0
    need = len(seeds) // 2 + 1
    for s in seeds:
        report = check(s)
        reports.append(report)
        if report.passed:
            passes += 1
        else:
            fails += 1
        if passes >= need or fails >= need:
            break
    final = reports[-1]
    final = ComparisonReport(
        name=final.name,
        empirical=final.empirical,
        exact=final.exact,
        tolerance=final.tolerance,
        verdict=_verdict(passes > fails),
        std_error=final.std_error,
        metadata={**final.metadata, "votes_pass": passes, "votes_fail": fails},
        rows=final.rows,
    )
    return final, reports


# -- serialization ----------------------------------------------------------------


def report_to_dict(report: ComparisonReport) -> dict:
    out = {
        "name": report.name,
        "empirical": report.empirical,
        "exact": report.exact,
        "tolerance": report.tolerance,
        "verdict": report.verdict,
    }
    if report.std_error is not None:
        out["std_error"] = report.std_error
    if report.metadata:
        out["metadata"] = report.metadata
    if report.rows:
        out["rows"] = report.rows
    return out


def reports_to_json(reports: Sequence[ComparisonReport]) -> str:
    return json.dumps([report_to_dict(r) for r in reports], sort_keys=True, indent=2)


def reports_to_text(reports: Sequence[ComparisonReport]) -> str:
    """Aligned-column rendering: name, empirical, exact, tolerance, verdict."""
    header = ("name", "empirical", "exact", "tolerance", "verdict")
    body = [
        (r.name, f"{r.empirical:.6g}", f"{r.exact:.6g}", f"{r.tolerance:.6g}", r.verdict)
        for r in reports
    ]
    widths = [max(len(row[c]) for row in [header, *body]) for c in range(5)]
    lines = []
    for row in [header, *body]:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"
