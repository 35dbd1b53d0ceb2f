"""Instance files, experiment reports, and the invariant suites.

The instance format is a small versioned JSON schema with named vertices;
all indices inside the library are positional, so the loader owns the name
mapping.  ``run_suite`` drives each module's invariant checks over the
built-in instances plus seeded random ones and collects per-check records
(both sides of every identity, the residual, and the verdict).
"""
from __future__ import annotations

import csv
import io
import json
import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from ._rng import derived_rng
from .errors import GraphConstructionError, InstanceFormatError, PreconditionError
from .graph_core import (
    Distribution,
    WeightedGraph,
    build_chain,
    chain_power,
    chain_to_graph,
)
from . import classical_walk as cw
from . import electric
from . import fast_forward as ff
from . import instances as inst
from . import quantum_core as qc
from . import search as srch

CSV_COLUMNS = ("instance", "operation", "lhs", "rhs", "residual", "tolerance", "verdict", "seed", "wall_ms")


# ---------------------------------------------------------------------------
# instance files


@dataclass(frozen=True, eq=False)
class InstanceFile:
    """Parsed, validated instance: named vertices plus positional matrices."""

    name: str
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str, float], ...]
    marked_names: tuple[str, ...]
    sigma_map: dict[str, float]
    C: float | None
    flags: frozenset[str]

    @property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    def graph(self) -> WeightedGraph:
        n = len(self.vertices)
        w = np.zeros((n, n))
        idx = self.index
        for u, v, weight in self.edges:
            w[idx[u], idx[v]] = weight
            w[idx[v], idx[u]] = weight
        try:
            return WeightedGraph(w, vertex_cap=max(64, n))
        except GraphConstructionError as e:
            for name, i in idx.items():
                if f"vertex {i} " in str(e):
                    raise InstanceFormatError(f"{e} (vertex {name!r})") from e
            raise InstanceFormatError(str(e)) from e

    def sigma(self) -> Distribution:
        p = np.zeros(len(self.vertices))
        idx = self.index
        for name, prob in self.sigma_map.items():
            p[idx[name]] = prob
        return Distribution(p / p.sum())

    def marked(self) -> frozenset[int]:
        idx = self.index
        return frozenset(idx[m] for m in self.marked_names)


_KNOWN_FIELDS = {"version", "vertices", "edges", "marked", "sigma", "C", "name"}


def load_instance(path: str, *, strict: bool = True) -> InstanceFile:
    """Parse and validate an instance file; diagnostics name the bad field."""
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as e:
            raise InstanceFormatError(f"{path}: not valid JSON ({e})") from e
    if not isinstance(raw, dict):
        raise InstanceFormatError(f"{path}: top level must be an object")
    unknown = set(raw) - _KNOWN_FIELDS
    flags: set[str] = set()
    if unknown:
        if strict:
            raise InstanceFormatError(f"{path}: unknown fields {sorted(unknown)}")
        warnings.warn(f"{path}: ignoring unknown fields {sorted(unknown)}", stacklevel=2)
        flags.add("unknown-fields")
    if raw.get("version") != 1:
        raise InstanceFormatError(f"{path}: field 'version' must be 1, got {raw.get('version')!r}")
    vertices = raw.get("vertices")
    if not isinstance(vertices, list) or not vertices or not all(isinstance(v, str) for v in vertices):
        raise InstanceFormatError(f"{path}: field 'vertices' must be a nonempty list of names")
    if len(set(vertices)) != len(vertices):
        raise InstanceFormatError(f"{path}: duplicate vertex names")
    names = set(vertices)

    edges: list[tuple[str, str, float]] = []
    seen: dict[frozenset, float] = {}
    for k, e in enumerate(raw.get("edges", [])):
        if not (isinstance(e, list) and len(e) == 3):
            raise InstanceFormatError(f"{path}: edge #{k} must be [u, v, weight]")
        u, v, weight = e
        if u not in names or v not in names:
            raise InstanceFormatError(f"{path}: edge #{k} ({u!r}, {v!r}) names an unknown vertex")
        if not isinstance(weight, (int, float)) or isinstance(weight, bool) or not math.isfinite(weight):
            raise InstanceFormatError(f"{path}: edge #{k} ({u!r}, {v!r}) has malformed weight {weight!r}")
        if weight < 0:
            raise InstanceFormatError(f"{path}: edge #{k} ({u!r}, {v!r}) has negative weight {weight!r}")
        key = frozenset((u, v))
        if key in seen:
            raise InstanceFormatError(
                f"{path}: edge ({u!r}, {v!r}) appears twice (weights {seen[key]!r} and {weight!r})"
            )
        seen[key] = float(weight)
        edges.append((u, v, float(weight)))

    marked = raw.get("marked", [])
    if not isinstance(marked, list) or not all(isinstance(m, str) for m in marked):
        raise InstanceFormatError(f"{path}: field 'marked' must be a list of names")
    bad = [m for m in marked if m not in names]
    if bad:
        raise InstanceFormatError(f"{path}: marked vertices {bad} are unknown")
    if not marked:
        flags.add("detect-mode")

    sigma = raw.get("sigma", {})
    if not isinstance(sigma, dict) or not sigma:
        raise InstanceFormatError(f"{path}: field 'sigma' must be a nonempty object")
    for name, prob in sigma.items():
        if name not in names:
            raise InstanceFormatError(f"{path}: sigma names unknown vertex {name!r}")
        if not isinstance(prob, (int, float)) or isinstance(prob, bool) or prob < 0:
            raise InstanceFormatError(f"{path}: sigma[{name!r}] = {prob!r} is malformed")
    total = sum(sigma.values())
    if sigma and abs(total - 1.0) > 1e-9:
        raise InstanceFormatError(f"{path}: sigma sums to {total!r}, not 1 (tolerance 1e-9)")
    overlap = sorted(set(sigma) & set(marked))
    if overlap and any(sigma[v] > 0 for v in overlap):
        raise InstanceFormatError(f"{path}: sigma puts mass on marked vertices {overlap}")

    C = raw.get("C")
    if C is not None and (not isinstance(C, (int, float)) or isinstance(C, bool) or C <= 0):
        raise InstanceFormatError(f"{path}: field 'C' must be a positive number, got {C!r}")

    out = InstanceFile(
        name=str(raw.get("name", path)),
        vertices=tuple(vertices),
        edges=tuple(edges),
        marked_names=tuple(marked),
        sigma_map={k: float(v) for k, v in sigma.items()},
        C=float(C) if C is not None else None,
        flags=frozenset(flags),
    )
    out.graph()  # surface isolated vertices and weight problems at load time
    return out


def save_instance(instance: InstanceFile, path: str) -> None:
    doc = {
        "version": 1,
        "name": instance.name,
        "vertices": list(instance.vertices),
        "edges": [[u, v, w] for u, v, w in instance.edges],
        "marked": list(instance.marked_names),
        "sigma": dict(instance.sigma_map),
    }
    if instance.C is not None:
        doc["C"] = instance.C
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def problem_to_instance(problem: inst.ProblemInstance) -> InstanceFile:
    """Render a built-in problem as a named instance file."""
    n = problem.graph.n
    vertices = tuple(f"v{i}" for i in range(n))
    edges = []
    w = problem.graph.weights
    for u in range(n):
        for v in range(u, n):
            if w[u, v] > 0:
                edges.append((vertices[u], vertices[v], float(w[u, v])))
    sigma = {
        vertices[i]: float(p)
        for i, p in enumerate(problem.sigma.probabilities)
        if p > 0
    }
    return InstanceFile(
        name=problem.name,
        vertices=vertices,
        edges=tuple(edges),
        marked_names=tuple(vertices[m] for m in sorted(problem.marked)),
        sigma_map=sigma,
        C=None,
        flags=frozenset(),
    )


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class CheckRecord:
    instance: str
    operation: str
    lhs: float
    rhs: float
    residual: float
    tolerance: float
    verdict: str
    seed: int
    wall_ms: float


@dataclass(eq=False)
class ExperimentReport:
    suite: str
    master_seed: int
    config: dict
    records: list[CheckRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.verdict == "pass" for r in self.records)

    @property
    def failures(self) -> list[CheckRecord]:
        return [r for r in self.records if r.verdict != "pass"]


def _record_dict(r: CheckRecord, include_timing: bool) -> dict:
    d = {
        "instance": r.instance,
        "operation": r.operation,
        "lhs": r.lhs,
        "rhs": r.rhs,
        "residual": r.residual,
        "tolerance": r.tolerance,
        "verdict": r.verdict,
        "seed": r.seed,
        "wall_ms": r.wall_ms if include_timing else 0.0,
    }
    return d


def report_to_json(report: ExperimentReport, *, include_timing: bool = True) -> str:
    doc = {
        "suite": report.suite,
        "master_seed": report.master_seed,
        "config": report.config,
        "passed": report.passed,
        "records": [_record_dict(r, include_timing) for r in report.records],
    }
    return json.dumps(doc, indent=2) + "\n"


def report_to_csv(report: ExperimentReport, *, include_timing: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in report.records:
        d = _record_dict(r, include_timing)
        writer.writerow([repr(d[c]) if isinstance(d[c], float) else d[c] for c in CSV_COLUMNS])
    return buf.getvalue()


def save_report(report: ExperimentReport, path: str, *, fmt: str = "json",
                include_timing: bool = True) -> None:
    text = (
        report_to_json(report, include_timing=include_timing)
        if fmt == "json"
        else report_to_csv(report, include_timing=include_timing)
    )
    with open(path, "w") as fh:
        fh.write(text)


def load_report_json(path: str) -> dict:
    with open(path) as fh:
        return json.load(fh)


# ---------------------------------------------------------------------------
# suite checks


def _rec(instance, operation, lhs, rhs, tol, seed, t0, *, one_sided=False) -> CheckRecord:
    lhs, rhs = float(lhs), float(rhs)
    residual = max(0.0, lhs - rhs) if one_sided else abs(lhs - rhs)
    return CheckRecord(
        instance=instance,
        operation=operation,
        lhs=lhs,
        rhs=rhs,
        residual=residual,
        tolerance=tol,
        verdict="pass" if residual <= tol else "fail",
        seed=seed,
        wall_ms=(time.perf_counter() - t0) * 1e3,
    )


def _check_path3_electric(seed):
    t0 = time.perf_counter()
    p3 = inst.path_three()
    r, _ = electric.effective_resistance(p3.graph, p3.sigma, p3.marked)
    cq = electric.commute_quantity(p3.graph, p3.sigma, p3.marked)
    c = p3.chain
    esc = cw.exact_return_prob(c, p3.start_set, p3.marked)
    com = cw.exact_commute_time(c, p3.start_set, p3.marked)
    return [
        _rec("path3", "effective_resistance", r, 10.0 / 9.0, 1e-12, seed, t0),
        _rec("path3", "commute_quantity", cq, 40.0 / 9.0, 1e-12, seed, t0),
        _rec("path3", "exact_return_prob", esc, 1.0 / 3.0, 1e-12, seed, t0),
        _rec("path3", "exact_commute_time", com, 13.0 / 3.0, 1e-12, seed, t0),
        _rec("path3", "commute_below_electric", com, cq, 0.0, seed, t0, one_sided=True),
    ]


def _check_commute_identities(seed):
    t0 = time.perf_counter()
    out = []
    for k in range(20):
        rng = derived_rng(seed, k)
        n = int(rng.integers(4, 11))
        g = inst.random_connected_graph(n, rng)
        c = build_chain(g)
        verts = rng.permutation(n)
        s, M = int(verts[0]), [int(verts[1])]
        r_s = g.total_weight * electric.effective_resistance(g, Distribution.point_mass(n, s), M)[0]
        com = cw.exact_commute_time(c, [s], M)
        out.append(_rec(f"random{n}#{k}", "electric_vs_commute", r_s / com, 1.0, 1e-8, seed, t0))
        ht = cw.exact_hitting_time(c, M)
        r_pi = g.total_weight * electric.effective_resistance(
            g, Distribution(c.pi), M, on_marked="absorb"
        )[0]
        out.append(_rec(f"random{n}#{k}", "electric_vs_hitting", r_pi / ht, 1.0, 1e-8, seed, t0))
    return out


def _check_gadget_forms(seed):
    t0 = time.perf_counter()
    out = []
    for k in range(6):
        rng = derived_rng(seed, 100 + k)
        prob = inst.random_instance(int(rng.integers(5, 9)), rng, start_size=2)
        g, sigma, M = prob.graph, prob.sigma, sorted(prob.marked)
        C_sig = electric.commute_quantity(g, sigma, M)
        C = float(C_sig * rng.uniform(1.0, 2.0))
        mod = electric.build_modified_graph(g, sigma, M, C)
        pi_p = build_chain(mod.graph).pi
        twin = float(pi_p[mod.base_size :].sum())
        out.append(_rec(prob.name, "gadget_start_mass", twin, 1.0 / (C + 2.0), 1e-12, seed, t0))
        c_prime = electric.commute_quantity(mod.graph, mod.sigma_prime, mod.marked_prime)
        predicted = (C_sig / C + 1.0) * (C + 2.0)
        out.append(_rec(prob.name, "gadget_commute_form", c_prime, predicted, 1e-9, seed, t0))
        # arbitrary start weights on the support
        raw = rng.uniform(0.2, 1.0, size=len(prob.start_set))
        rho = np.zeros(g.n)
        rho[list(prob.start_set)] = raw / raw.sum()
        rho = Distribution(rho)
        p_inv = float(np.sum(rho.probabilities[list(prob.start_set)] ** 2
                             / sigma.probabilities[list(prob.start_set)]))
        c_rho = electric.commute_quantity(g, rho, M)
        c_rho_prime = electric.commute_quantity(
            mod.graph, electric.lift_to_layers(mod, rho), mod.marked_prime
        )
        out.append(_rec(
            prob.name, "gadget_commute_form_general",
            c_rho_prime, (c_rho / C + p_inv) * (C + 2.0), 1e-9, seed, t0,
        ))
    return out


def _check_flow_properties(seed):
    t0 = time.perf_counter()
    out = []
    for k in range(5):
        rng = derived_rng(seed, 200 + k)
        prob = inst.random_instance(int(rng.integers(5, 11)), rng)
        r, flow = electric.effective_resistance(prob.graph, prob.sigma, prob.marked)
        out.append(_rec(prob.name, "flow_energy_equals_resistance", flow.energy(), r, 1e-10, seed, t0))
        # a random circulation strictly increases the dissipated power
        w = prob.graph.weights
        n = prob.graph.n
        cyc = np.zeros((n, n))
        nodes = [u for u in range(n) if u not in prob.marked]
        tri = None
        for a in nodes:
            for b in range(n):
                for cvx in range(n):
                    if len({a, b, cvx}) == 3 and w[a, b] > 0 and w[b, cvx] > 0 and w[cvx, a] > 0:
                        tri = (a, b, cvx)
                        break
                if tri:
                    break
            if tri:
                break
        if tri:
            a, b, cvx = tri
            eps = 1e-3 * rng.uniform(0.5, 1.5)
            for x, y in ((a, b), (b, cvx), (cvx, a)):
                cyc[x, y] += eps
                cyc[y, x] -= eps
            perturbed = flow.flow + cyc
            iu = np.triu_indices(n, k=1)
            mask = w[iu] > 0
            energy = float(np.sum(perturbed[iu][mask] ** 2 / w[iu][mask]))
            out.append(_rec(prob.name, "flow_unique_minimum", r, energy, 0.0, seed, t0, one_sided=True))
        # adding an edge never increases the resistance
        g2w = np.array(prob.graph.weights)
        free = np.argwhere(g2w == 0)
        free = [e for e in free if e[0] < e[1]]
        if free:
            u, v = free[int(rng.integers(0, len(free)))]
            g2w[u, v] = g2w[v, u] = rng.uniform(0.5, 2.0)
            r2, _ = electric.effective_resistance(WeightedGraph(g2w), prob.sigma, prob.marked)
            out.append(_rec(prob.name, "resistance_monotone", r2, r, 1e-12, seed, t0, one_sided=True))
    return out


def _check_contraction(seed):
    t0 = time.perf_counter()
    out = []
    for k in range(5):
        rng = derived_rng(seed, 300 + k)
        prob = inst.random_instance(int(rng.integers(5, 9)), rng, start_size=2)
        g, S, M = prob.graph, list(prob.start_set), sorted(prob.marked)
        cg = electric.contract_set(g, S)
        out.append(_rec(prob.name, "contraction_keeps_weight", cg.total_weight, g.total_weight, 1e-12, seed, t0))
        r_set = electric.set_resistance(g, S, M)
        for j in range(20):
            raw = rng.uniform(0.1, 1.0, size=len(S))
            rho = np.zeros(g.n)
            rho[S] = raw / raw.sum()
            r_rho, _ = electric.effective_resistance(g, Distribution(rho), M)
            if j < 3:
                out.append(_rec(prob.name, "set_resistance_lower_bound", r_set, r_rho, 1e-10, seed, t0, one_sided=True))
    return out


def _check_path3_classical(seed):
    t0 = time.perf_counter()
    p3 = inst.path_three()
    c = p3.chain
    ht_v = cw.exact_hitting_time(c, p3.marked, Distribution.point_mass(3, 1))
    kac = cw.exact_expected_return(c, p3.start_set)
    return [
        _rec("path3", "hitting_from_middle", ht_v, 3.0, 1e-12, seed, t0),
        _rec("path3", "kac_return_time", kac, 4.0 / 3.0, 1e-12, seed, t0),
    ]


def _check_stopping_identities(seed):
    t0 = time.perf_counter()
    out = []
    for k in range(12):
        rng = derived_rng(seed, 400 + k)
        n = int(rng.integers(4, 11))
        prob = inst.random_instance(n, rng, start_size=int(rng.integers(1, 3)))
        c = prob.chain
        S, M = list(prob.start_set), sorted(prob.marked)
        g = prob.graph
        C_SM = g.total_weight * electric.set_resistance(g, S, M)
        pr = cw.exact_return_prob(c, S, M)
        pi_S = float(c.pi[S].sum())
        out.append(_rec(prob.name, "escape_identity", pr * C_SM * pi_S, 1.0, 1e-8, seed, t0))
        out.append(_rec(prob.name, "kac_identity", cw.exact_expected_return(c, S) * pi_S, 1.0, 1e-9, seed, t0))
        s = S[0]
        pr_s = cw.exact_return_prob(c, [s], M)
        com_s = cw.exact_commute_time(c, [s], M)
        out.append(_rec(prob.name, "singleton_escape_identity", pr_s * com_s * c.pi[s], 1.0, 1e-8, seed, t0))
    return out


def _check_chain_power(seed):
    t0 = time.perf_counter()
    out = []
    for k in range(6):
        rng = derived_rng(seed, 500 + k)
        prob = inst.random_instance(int(rng.integers(4, 9)), rng)
        c = prob.chain
        d1 = qc.discriminant(c).matrix
        c4 = chain_power(c, 4)
        d4 = qc.discriminant(c4).matrix
        out.append(_rec(prob.name, "power_of_symmetric_form",
                        float(np.max(np.abs(np.linalg.matrix_power(d1, 4) - d4))), 0.0, 1e-10, seed, t0))
    return out


def _check_boxes(seed):
    t0 = time.perf_counter()
    out = []
    rng = derived_rng(seed, 600)
    for k in range(200):
        length = int(rng.integers(1, 12))
        labels = "".join(rng.choice(list(".SM"), size=length))
        y = cw.BoxSequence(labels)
        r_S, r_M = int(rng.integers(1, 5)), int(rng.integers(1, 9))
        stretched = cw.stretch_deterministic(y, cw.InterpolationParams.from_holding_times(r_S, r_M))
        lo = int(rng.integers(0, 10))
        hi = lo + int(rng.integers(0, 20))
        for label in "SM.":
            fast = cw.stretched_count(y, r_S, r_M, label, lo, hi)
            slow = stretched.count(label, lo, hi)
            if fast != slow:
                out.append(_rec(f"boxes#{k}", "stretched_count", fast, slow, 0.0, seed, t0))
    out.append(_rec("boxes", "stretched_count_sampled", 0.0, 0.0, 0.0, seed, t0))
    # witness existence on random hypothesis-satisfying sequences
    found = 0
    trials = 300
    for k in range(trials):
        T = int(rng.choice([4, 8, 16]))
        y = _random_hypothesis_sequence(rng, T)
        if cw.find_stretch_witness(y, T) is not None:
            found += 1
    out.append(_rec("boxes", "witness_exists", found, trials, 0.0, seed, t0))
    return out


def _random_hypothesis_sequence(rng, T: int, max_len: int = 24) -> cw.BoxSequence:
    ht = int(rng.integers(1, max(2, T - 1)))
    ct = int(rng.integers(ht + 1, T + 1))
    mid = "".join(rng.choice(list(".M"), size=max(0, ct - ht - 1)))
    head = "S" + "." * (ht - 1) + "M" + mid + "S"
    tail_len = int(rng.integers(0, max_len - len(head) + 1)) if max_len > len(head) else 0
    tail = "".join(rng.choice(list(".SM"), size=tail_len))
    return cw.BoxSequence(head + tail)


def _check_hit_and_return(seed):
    t0 = time.perf_counter()
    p3 = inst.path_three()
    C = electric.commute_quantity(p3.graph, p3.sigma, p3.marked)
    mod = electric.build_modified_graph(p3.graph, p3.sigma, sorted(p3.marked), C)
    c = build_chain(mod.graph)
    c_prime = electric.commute_quantity(mod.graph, mod.sigma_prime, mod.marked_prime)
    T = int(math.ceil(4 * c_prime))
    trials = 20_000
    freq = cw.hit_and_return_frequency(
        c, mod.start_support, mod.marked_prime, 0.5, T, trials=trials, seed=seed
    )
    se = math.sqrt(0.25 / trials)
    return [_rec("path3-gadget", "hit_and_return_frequency", 0.25 - 3 * se, freq, 0.0, seed, t0, one_sided=True)]


def _check_block_encodings(seed):
    t0 = time.perf_counter()
    out = []
    probs = [inst.path_three(), inst.random_instance(5, derived_rng(seed, 700))]
    for prob in probs:
        c = prob.chain
        d = qc.discriminant(c)
        w = qc.szegedy_walk(c)
        out.append(_rec(prob.name, "szegedy_block", qc.verify_block_encoding(w, d.matrix, 1e-10), 0.0, 1e-10, seed, t0))
        for s in (0.0, 0.25, 0.5, 0.9):
            wi = qc.interpolated_walk_unitary(w, prob.marked, s)
            di = qc.discriminant(cw.interpolate_absorbing(c, prob.marked, s)) if s > 0 else d
            out.append(_rec(prob.name, f"interpolated_block_s={s}", qc.verify_block_encoding(wi, di.matrix, 1e-10), 0.0, 1e-10, seed, t0))
        lam = qc.lambda_unitary(prob.sigma, c.pi, 2.0)
        wm = qc.modified_walk_unitary(w, lam)
        mod = electric.build_modified_graph(prob.graph, prob.sigma, sorted(prob.marked), 2.0)
        dm = qc.discriminant(build_chain(mod.graph))
        target = qc.embed_modified_discriminant(dm, mod.base_size, mod.support)
        out.append(_rec(prob.name, "gadget_walk_block", qc.verify_block_encoding(wm, target, 1e-10), 0.0, 1e-10, seed, t0))
        evals_P = np.sort(np.linalg.eigvals(c.P).real)
        out.append(_rec(prob.name, "shared_spectrum", float(np.max(np.abs(np.sort(d.eigenvalues) - evals_P))), 0.0, 1e-10, seed, t0))
        root_pi = np.sqrt(c.pi)
        out.append(_rec(prob.name, "fixed_point", float(np.max(np.abs(d.power_apply(5, root_pi) - root_pi))), 0.0, 1e-10, seed, t0))
    return out


def _check_double_interpolation(seed):
    t0 = time.perf_counter()
    out = []
    prob = inst.random_instance(5, derived_rng(seed, 800), start_size=1)
    c = prob.chain
    S, M = list(prob.start_set), sorted(prob.marked)
    params = cw.InterpolationParams(0.3, 0.6)
    w = qc.szegedy_walk(c)
    w_s = qc.interpolated_walk_unitary(w, S, params.q_S)
    w_sm = qc.interpolated_walk_unitary(w_s, M, params.q_M)
    d2 = qc.discriminant(cw.interpolate_two(c, S, M, params))
    out.append(_rec(prob.name, "double_interpolation_block", qc.verify_block_encoding(w_sm, d2.matrix, 1e-10), 0.0, 1e-10, seed, t0))
    return out


def _check_scalar_bound(seed):
    t0 = time.perf_counter()
    out = []
    grid = np.linspace(-1.0, 1.0, 2001)
    for t in (3, 8, 27, 64):
        for eps in (1e-1, 1e-2, 1e-3):
            exp = ff.chebyshev_expansion(t, eps)
            vals = np.array([ff.eval_poly_scalar(exp, x) for x in grid])
            err = float(np.max(np.abs(vals - grid**t)))
            out.append(_rec(f"t={t}", f"scalar_bound_eps={eps}", err, 0.0, eps, seed, t0))
    return out


def _check_reflection_chebyshev(seed):
    t0 = time.perf_counter()
    out = []
    prob = inst.random_instance(5, derived_rng(seed, 900))
    c = prob.chain
    d = qc.discriminant(c)
    w = qc.szegedy_walk(c)
    for n in range(0, 9):
        blk = ff.walk_power_reflections(w, n).block()
        lam = np.polynomial.chebyshev.chebval(d.eigenvalues, [0.0] * (2 * n) + [1.0])
        ref = d.eigenvectors @ np.diag(lam) @ d.eigenvectors.T
        out.append(_rec(prob.name, f"reflection_chebyshev_n={n}", float(np.max(np.abs(blk - ref))), 0.0, 1e-9, seed, t0))
    return out


def _check_fast_forward(seed):
    t0 = time.perf_counter()
    out = []
    prob = inst.random_instance(5, derived_rng(seed, 1000))
    c = prob.chain
    d = qc.discriminant(c)
    w = qc.szegedy_walk(c)
    rng = derived_rng(seed, 1001)
    for t in (8, 32):
        for eps in (1e-1, 1e-2):
            u = ff.fast_forward_unitary(w, t, eps)
            blk = u.block()
            worst = 0.0
            for _ in range(10):
                psi = rng.normal(size=c.n)
                psi /= np.linalg.norm(psi)
                worst = max(worst, float(np.linalg.norm(d.power_apply(t, psi) - blk @ psi)))
            out.append(_rec(prob.name, f"ff_bound_t={t}_eps={eps}", worst, 0.0, 2 * eps, seed, t0))
            bound = 4 * math.ceil(math.sqrt(2 * t * math.log(2 / eps))) + 4
            out.append(_rec(prob.name, f"ff_counter_t={t}_eps={eps}", u.counters["walk"], bound, 0.0, seed, t0, one_sided=True))
    return out


def _check_ladder_sectors(seed):
    t0 = time.perf_counter()
    out = []
    prob = inst.random_instance(4, derived_rng(seed, 1100))
    w = qc.szegedy_walk(prob.chain)
    ladder = ff.controlled_walk_ladder(w, 2)
    G = ff.reflection_product(w)
    dim = w.dim
    for m in range(4):
        sector = ladder.matrix[m * dim : (m + 1) * dim, m * dim : (m + 1) * dim]
        ref = np.linalg.matrix_power(G, m)
        out.append(_rec(prob.name, f"ladder_sector_{m}", float(np.max(np.abs(sector - ref))), 0.0, 1e-10, seed, t0))
    return out


def _check_amplification(seed):
    t0 = time.perf_counter()
    out = []
    rng = derived_rng(seed, 1200)
    for k in range(5):
        p = float(rng.uniform(0.01, 0.6))
        dim = 8
        good = np.zeros(dim, dtype=bool)
        good[:2] = True
        vec = np.zeros(dim)
        vec[:2] = math.sqrt(p / 2.0)
        vec[2:] = math.sqrt((1 - p) / (dim - 2))
        state = qc.QuantumState(vec.astype(complex), 1, dim)
        for rounds in range(4):
            res = srch.amplitude_amplify(state, good, rounds)
            got = float(np.sum(np.abs(res.amplitudes[:2]) ** 2))
            want = math.sin((2 * rounds + 1) * math.asin(math.sqrt(p))) ** 2
            out.append(_rec(f"aa#{k}", f"amplify_rounds={rounds}", got, want, 1e-10, seed, t0))
    return out


def _check_projection_inequality(seed):
    t0 = time.perf_counter()
    out = []
    rng = derived_rng(seed, 1300)
    for k in range(10):
        prob = inst.random_instance(int(rng.integers(4, 7)), rng, start_size=1)
        C = electric.commute_quantity(prob.graph, prob.sigma, sorted(prob.marked))
        mod = electric.build_modified_graph(prob.graph, prob.sigma, sorted(prob.marked), C)
        c = build_chain(mod.graph)
        S, M = list(mod.start_support), sorted(mod.marked_prime)
        params = cw.InterpolationParams(float(rng.uniform(0, 0.8)), float(rng.uniform(0, 0.9)))
        cq = cw.interpolate_two(c, S, M, params)
        d = qc.discriminant(cq)
        sqrt_sigma = np.sqrt(mod.sigma_prime.probabilities)
        t = int(rng.integers(1, 12))
        t2 = t + int(rng.integers(1, 12))
        lhs = float(np.linalg.norm(d.power_apply(t, sqrt_sigma)[M]))
        start = mod.sigma_prime.probabilities
        mid = start @ np.linalg.matrix_power(cq.P, t)
        mid_masked = np.zeros_like(mid)
        mid_masked[M] = mid[M]
        joint = float(np.sum((mid_masked @ np.linalg.matrix_power(cq.P, t2 - t))[S]))
        out.append(_rec(prob.name, "projection_dominates_joint", joint, lhs, 1e-10, seed, t0, one_sided=True))
    return out


def _check_search_end_to_end(seed):
    t0 = time.perf_counter()
    out = []
    p3 = inst.path_three()
    cfg = srch.SearchConfig(T=16, seed=int(seed))
    best, history = srch.doubling_sweep(p3.chain, p3.sigma, sorted(p3.marked), cfg)
    out.append(_rec("path3", "sweep_success", cfg.success_threshold, best.success_probability, 0.0, seed, t0, one_sided=True))
    nu1 = srch.fastforward_vertex_distribution(p3.chain, p3.sigma, sorted(p3.marked), srch.SearchConfig(T=16, seed=int(seed)))
    nu2, _ = srch.simple_vertex_distribution(p3.chain, p3.sigma, sorted(p3.marked), srch.SearchConfig(T=16, seed=int(seed)))
    out.append(_rec("path3", "mixture_equivalence_tv", srch.distribution_tv(nu1, nu2), 0.0, 1e-8, seed, t0))
    a = srch.search_simple(p3.chain, p3.sigma, sorted(p3.marked), srch.SearchConfig(T=16, seed=int(seed)))
    b = srch.search_simple(p3.chain, p3.sigma, sorted(p3.marked), srch.SearchConfig(T=16, seed=int(seed)))
    same = float(a.success_probability == b.success_probability and a.found == b.found)
    out.append(_rec("path3", "determinism", same, 1.0, 0.0, seed, t0))
    return out


_SUITES = {
    "electric": [
        _check_path3_electric,
        _check_commute_identities,
        _check_gadget_forms,
        _check_flow_properties,
        _check_contraction,
    ],
    "classical": [
        _check_path3_classical,
        _check_stopping_identities,
        _check_chain_power,
        _check_boxes,
        _check_hit_and_return,
    ],
    "quantum": [
        _check_block_encodings,
        _check_double_interpolation,
    ],
    "ffwd": [
        _check_scalar_bound,
        _check_reflection_chebyshev,
        _check_fast_forward,
        _check_ladder_sectors,
    ],
    "search": [
        _check_amplification,
        _check_projection_inequality,
        _check_search_end_to_end,
    ],
}


def suite_names() -> tuple[str, ...]:
    return tuple(_SUITES) + ("all",)


def run_suite(name: str, seed: int, *, max_workers: int = 4) -> ExperimentReport:
    """Execute one named suite (or 'all'); failures are collected, not raised.

    Items run in a small worker pool; each derives its own generator from
    (master seed, item counter), so the report does not depend on
    scheduling.  Exit-code semantics live in the CLI layer.
    """
    if name == "all":
        checks = [fn for fns in _SUITES.values() for fn in fns]
    elif name in _SUITES:
        checks = list(_SUITES[name])
    else:
        raise PreconditionError(f"unknown suite {name!r}; choose from {suite_names()}")
    report = ExperimentReport(suite=name, master_seed=int(seed), config={"suite": name, "seed": int(seed)})
    results: list[tuple[int, list[CheckRecord]]] = []

    def _run(idx_fn):
        idx, fn = idx_fn
        try:
            return idx, fn(seed)
        except Exception as e:  # collected, never aborts the suite
            return idx, [CheckRecord(
                instance=fn.__name__, operation="exception", lhs=math.nan, rhs=math.nan,
                residual=math.inf, tolerance=0.0, verdict=f"fail: {type(e).__name__}: {e}",
                seed=int(seed), wall_ms=0.0,
            )]

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        for idx, recs in pool.map(_run, enumerate(checks)):
            results.append((idx, recs))
    for _, recs in sorted(results, key=lambda pair: pair[0]):
        report.records.extend(recs)
    return report
