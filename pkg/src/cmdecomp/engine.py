"""Drivers: Algorithm 1, the two-stage Algorithm 2 and its large-q form, and H_D over Z.

Each run fixes a subgroup G of the class group, so H_D mod p factors into
m = h/|G| orbit polynomials P_i.  Integer polynomials V and W_k built from
those factors are reconstructed modulo q (or over Z) with the CRT; a root y
of V then yields U(X, y), whose roots are roots of H_D.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

from . import decomp
from .arith import is_prime
from .clgroup import (Presentation, SubgroupSpec, build_presentation,
                      subgroup_candidates, subgroup_for_order)
from .decomp import SymFunc
from .ecrt import CrtAccumulator, CrtContext, crt_vectors, finalize
from .fppoly import (Poly, _frobenius_gcd, degree, derivative, evaluate, exact_div,
                     find_root, poly_gcd, roots, split_check)
from .heights import (HeightProfile, best_subgroup, height_bound_general,
                      height_bound_opt, profile_for, stage_bound)
from .isogwalk import (CurveFp, ModPoly, NotFound, WalkError, curve_from_j,
                       enumerate_orbits, find_j1, load_modpolys, verify_order)
from .normprimes import PrimeSet, SplitPrime, select_primes, solve_norm
from .qform import LimitExceeded, conductor

ALGORITHMS = ("A1", "A2", "A2L")
SMALL_ROOT_SET = 64


class NoValidRoot(RuntimeError):
    """Every attempt produced a V without a usable simple root."""


class OrderMismatch(RuntimeError):
    """Neither the curve nor its twist has the expected number of points."""


class InvalidInput(ValueError):
    """Bad discriminant, target prime or configuration."""


class BudgetExceeded(TimeoutError):
    """The run passed its wall-clock budget before finishing."""


@dataclass
class RunConfig:
    D: int
    q: int
    algorithm: str = "A1"
    order: int | None = None            # |G|; None selects by height
    subgroup: tuple[int, int] | None = None  # explicit (d, e)
    s_policy: str = "e1"                # e1, minus_e1 or random
    seed: int = 0
    crt_mode: str = "B"
    modpoly_dir: str | None = None
    threads: int = 1
    max_attempts: int = 6
    time_budget: float | None = None    # seconds; None means unlimited

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise InvalidInput(f"algorithm must be one of {ALGORITHMS}")
        if self.s_policy not in ("e1", "minus_e1", "random"):
            raise InvalidInput("s_policy must be e1, minus_e1 or random")
        self.deadline = (None if self.time_budget is None
                         else time.monotonic() + self.time_budget)


@dataclass
class Stats:
    t_find: float = 0.0
    t_enum: float = 0.0
    t_build: float = 0.0
    t_crt: float = 0.0
    t_root: float = 0.0
    primes: int = 0
    prime_passes: int = 0
    retries: int = 0
    rejected_primes: list[int] = field(default_factory=list)
    peak_accumulators: dict[str, int] = field(default_factory=dict)
    bound_bits: int = 0

    def merge(self, other: dict) -> None:
        for k in ("t_find", "t_enum", "t_build"):
            setattr(self, k, getattr(self, k) + other.get(k, 0.0))


@dataclass
class CMResult:
    D: int
    q: int
    algorithm: str
    n: int
    m: int
    subgroup: SubgroupSpec
    s: SymFunc
    V: Poly
    W: list[Poly] | None
    w: list[int] | None
    y: int
    U: Poly
    x: int
    curve: CurveFp
    t: int
    N: int
    certified: bool
    stats: Stats
    S: list[int]

    def to_json(self, timings: bool = False) -> dict:
        """JSON-ready dict; every large integer as a decimal string.

        Wall-clock timings are left out unless asked for, so that seeded
        runs serialise identically.
        """
        st = asdict(self.stats)
        if not timings:
            st = {k: v for k, v in st.items() if not k.startswith("t_")}
        return {
            "D": str(self.D), "q": str(self.q), "algorithm": self.algorithm,
            "n": self.n, "m": self.m,
            "subgroup": {"d": self.subgroup.d, "e": self.subgroup.e},
            "s": self.s.to_json(),
            "V": [str(c) for c in self.V],
            "W": None if self.W is None else [[str(c) for c in wk] for wk in self.W],
            "w": None if self.w is None else [str(c) for c in self.w],
            "y": str(self.y), "U": [str(c) for c in self.U], "x": str(self.x),
            "curve": {"a": str(self.curve.a), "b": str(self.curve.b), "p": str(self.curve.p)},
            "t": str(self.t), "order": str(self.N), "certified": self.certified,
            "primes": len(self.S),
            "stats": st,
        }


# ---------------------------------------------------------------- setup

@dataclass
class Plan:
    D: int
    P: Presentation
    G: SubgroupSpec
    modpolys: dict[int, ModPoly]

    @property
    def n(self) -> int:
        return self.G.n

    @property
    def m(self) -> int:
        return self.G.m


def _check_D(D: int) -> None:
    if D >= 0 or D % 4 not in (0, 1):
        raise InvalidInput(f"{D} is not a negative discriminant")
    if conductor(D) != 1:
        raise InvalidInput(f"{D} is not fundamental; only maximal orders are supported")


def make_plan(D: int, order: int | None = None, subgroup: tuple[int, int] | None = None,
              q: int | None = None, modpoly_dir=None) -> Plan:
    _check_D(D)
    P = build_presentation(D)
    if subgroup is not None:
        d, e = subgroup
        G = next((c for c in subgroup_candidates(P) if (c.d, c.e) == (d, e)), None)
        if G is None:
            raise InvalidInput(f"(d, e) = {subgroup} is not an admissible subgroup")
    elif order is not None:
        try:
            G = subgroup_for_order(P, order)
        except ValueError as exc:
            raise InvalidInput(str(exc)) from None
    else:
        G, _ = best_subgroup(P, subgroup_candidates(P), q)
    if q is not None and 2 * G.n * G.n > q:
        raise InvalidInput(f"|G| = {G.n} violates 2|G|^2 <= q")
    mps = load_modpolys(P.norms, modpoly_dir)
    return Plan(D, P, G, mps)


def height_bits(plan: Plan, s: SymFunc) -> int:
    prof = profile_for(plan.P, plan.G)
    return height_bound_opt(prof) if s.shortcut else height_bound_general(prof)


# ---------------------------------------------------------------- per-prime work

@dataclass
class PrimeData:
    thetas: list[list[int]]
    ys: list[int]
    j1: int
    t_find: float
    t_enum: float


def orbit_data(plan: Plan, sp: SplitPrime, s: SymFunc, seed: int,
               j1: int | None = None) -> PrimeData:
    """theta_ik and y_i mod p for every G-orbit."""
    p = sp.p
    t0 = time.perf_counter()
    if j1 is None:
        j1 = find_j1(plan.D, sp, seed=seed, h_hint=plan.P.h)
    t1 = time.perf_counter()
    rows = enumerate_orbits(j1, plan.P, plan.G, plan.modpolys, p, surface2=sp.v == 2)
    thetas = [decomp.orbit_to_theta(r, p) for r in rows]
    s_p = s if s.kind != "random" else SymFunc("random", tuple(c % p for c in s.coeffs))
    ys = [decomp.y_from_theta(th, s_p, p) for th in thetas]
    t2 = time.perf_counter()
    return PrimeData(thetas, ys, j1, t1 - t0, t2 - t1)


def coefficient_vector(plan: Plan, pd: PrimeData, p: int, s: SymFunc) -> list[int]:
    """Non-leading coefficients of V followed by those of W_0, W_1, ... mod p."""
    V = decomp.build_V(pd.ys, p)
    W = decomp.build_W(pd.thetas, pd.ys, p, skip_top=s.shortcut)
    m = plan.m
    out = (V + [0] * (m + 1))[:m]
    for wk in W:
        out.extend((wk + [0] * m)[:m])
    return out


def _task(args):
    kind, plan, sp, s, seed, j1, extra = args
    try:
        pd = orbit_data(plan, sp, s, seed, j1)
    except (WalkError, NotFound) as exc:
        return ("reject", sp.p, str(exc))
    t0 = time.perf_counter()
    p = sp.p
    if kind == "A1":
        vec = coefficient_vector(plan, pd, p, s)
    elif kind == "V":
        vec = (decomp.build_V(pd.ys, p) + [0] * (plan.m + 1))[:plan.m]
    elif kind == "w":
        vec = decomp.eval_w(pd.thetas, pd.ys, extra % p, p, skip_top=s.shortcut)
    elif kind == "wL":
        W = decomp.build_W(pd.thetas, pd.ys, p, skip_top=s.shortcut)
        powers = [x % p for x in extra]
        vec = [sum(c * yp for c, yp in zip(wk, powers)) % p for wk in W]
    else:
        raise ValueError(kind)
    tb = time.perf_counter() - t0
    return ("ok", p, vec, pd.j1, pd.t_find, pd.t_enum, tb)


def _run_primes(kind: str, plan: Plan, S: PrimeSet, s: SymFunc, seed: int,
                cache: dict[int, int], sink: Callable[[int, list[int]], None],
                stats: Stats, threads: int, extra=None,
                deadline: float | None = None) -> list[int]:
    """Process every prime; returns the primes that had to be rejected."""
    jobs = [(kind, plan, sp, s, seed, cache.get(sp.p), extra) for sp in S.primes]
    rejected = []
    ex = None
    if threads > 1 and len(jobs) > 1:
        ex = ProcessPoolExecutor(max_workers=threads)
        results = ex.map(_task, jobs, chunksize=max(1, min(64, len(jobs) // (4 * threads))))
    else:
        results = map(_task, jobs)
    try:
        _consume(results, rejected, cache, sink, stats, deadline, len(jobs))
    finally:
        if ex is not None:
            ex.shutdown(wait=True, cancel_futures=True)
    stats.prime_passes += len(jobs)
    return rejected


def _consume(results, rejected, cache, sink, stats, deadline, total):
    for i, res in enumerate(results):
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExceeded(f"time budget exhausted after {i} of {total} primes")
        if res[0] == "reject":
            rejected.append(res[1])
            continue
        _, p, vec, j1, tf, te, tb = res
        cache[p] = j1
        stats.t_find += tf
        stats.t_enum += te
        stats.t_build += tb
        t0 = time.perf_counter()
        sink(i, vec)
        stats.t_crt += time.perf_counter() - t0


def _accumulate(ctx: CrtContext, accs: list[CrtAccumulator]):
    q = ctx.q

    def sink(i: int, vec: list[int]) -> None:
        p, a, Mi = ctx.prime_weights(i)
        for acc, c in zip(accs, vec):
            acc.add(c, p, a, Mi, q)
    return sink


def _crt_stage(kind: str, plan: Plan, cfg: RunConfig, bits: int, s: SymFunc,
               cache: dict[int, int], stats: Stats, width: int, label: str,
               extra=None, exclude: set[int] | None = None) -> tuple[list[int], PrimeSet]:
    """Explicit CRT of ``width`` targets mod q; refills S when a prime is rejected."""
    exclude = set() if exclude is None else exclude
    while True:
        S = select_primes(plan.D, bits, plan.P.norms, exclude=exclude | {cfg.q})
        ctx = CrtContext(S.moduli, cfg.q, cfg.crt_mode)
        accs = [CrtAccumulator() for _ in range(width)]
        CrtAccumulator.reset_peak()
        rejected = _run_primes(kind, plan, S, s, cfg.seed, cache,
                               _accumulate(ctx, accs), stats, cfg.threads, extra,
                               cfg.deadline)
        stats.peak_accumulators[label] = max(stats.peak_accumulators.get(label, 0),
                                             CrtAccumulator.peak)
        if not rejected:
            stats.primes = max(stats.primes, len(S))
            out = [finalize(a, ctx) for a in accs]
            del accs
            return out, S
        stats.rejected_primes.extend(rejected)
        exclude |= set(rejected)
        del accs


# ---------------------------------------------------------------- root selection

def pick_root(f: Poly, q: int, seed: int = 0, exclude_roots_of: Poly | None = None) -> int | None:
    """Smallest admissible root when there are few, otherwise a seeded random one."""
    lin = _frobenius_gcd(f, q)
    if exclude_roots_of is not None and degree(lin) > 0:
        common = poly_gcd(lin, exclude_roots_of, q)
        if degree(common) > 0:
            lin = exact_div(lin, common, q)
    if degree(lin) < 1:
        return None
    if degree(lin) <= SMALL_ROOT_SET:
        return roots(lin, q)[0]
    return find_root(lin, q, seed)


def _choose_y(V: Poly, q: int, seed: int) -> int | None:
    return pick_root(V, q, seed, exclude_roots_of=derivative(V, q))


def _unpack_A1(vec: list[int], m: int, n_w: int) -> tuple[Poly, list[Poly]]:
    V = vec[:m] + [1]
    W = [vec[m + k * m: m + (k + 1) * m] for k in range(n_w)]
    return V, W


def _finish(cfg: RunConfig, plan: Plan, s: SymFunc, V: Poly, y: int, wvals: list[int],
            stats: Stats, W=None, w=None, S=()) -> CMResult:
    q = cfg.q
    t0 = time.perf_counter()
    vp = evaluate(derivative(V, q), y, q)
    U = decomp.assemble_U(vp, y, wvals, s, q, plan.n)
    x = pick_root(U, q, cfg.seed)
    if x is None:
        raise NoValidRoot("U(X, y) has no root in F_q")
    t, _v = solve_norm(cfg.D, q)
    curve, N, cert = build_curve(x, q, t)
    stats.t_root += time.perf_counter() - t0
    return CMResult(cfg.D, q, cfg.algorithm, plan.n, plan.m, plan.G, s, V, W, w, y, U, x,
                    curve, t, N, cert, stats, list(S))


def build_curve(x: int, q: int, t: int) -> tuple[CurveFp, int, bool]:
    """Curve with j-invariant x and q + 1 -+ t points (twisting when needed)."""
    E = curve_from_j(x, q)
    for N in (q + 1 - t, q + 1 + t):
        chk = verify_order(E, N)
        if chk.matches:
            return E, N, chk.certified
    raise OrderMismatch(f"no curve with j = {x} has trace +-{t} over F_{q}")


# ---------------------------------------------------------------- algorithms

def _validate_q(cfg: RunConfig) -> None:
    if not is_prime(cfg.q):
        raise InvalidInput(f"q = {cfg.q} is not prime")
    if solve_norm(cfg.D, cfg.q) is None:
        raise InvalidInput(f"q = {cfg.q} does not split completely for D = {cfg.D}")


def _symfuncs(cfg: RunConfig, plan: Plan):
    for attempt in range(cfg.max_attempts):
        yield attempt, decomp.choose_symfunc(plan.n, plan.m, attempt, cfg.seed, cfg.s_policy)


def _prepare(cfg: RunConfig) -> Plan:
    _check_D(cfg.D)
    _validate_q(cfg)
    return make_plan(cfg.D, cfg.order, cfg.subgroup, cfg.q, cfg.modpoly_dir)


def algorithm1(cfg: RunConfig, plan: Plan | None = None) -> CMResult:
    plan = plan or _prepare(cfg)
    stats = Stats()
    cache: dict[int, int] = {}
    q = cfg.q
    for attempt, s in _symfuncs(cfg, plan):
        stats.retries = attempt
        bits = height_bits(plan, s)
        stats.bound_bits = bits
        n_w = plan.n - 1 if s.shortcut else plan.n
        vec, S = _crt_stage("A1", plan, cfg, bits, s, cache, stats,
                            plan.m * (1 + n_w), "A1")
        V, W = _unpack_A1(vec, plan.m, n_w)
        if not split_check(V, q):
            raise NoValidRoot("V mod q does not split; height bound violated")
        t0 = time.perf_counter()
        y = _choose_y(V, q, cfg.seed)
        stats.t_root += time.perf_counter() - t0
        if y is None:
            continue
        wvals = [evaluate(wk, y, q) for wk in W]
        return _finish(cfg, plan, s, V, y, wvals, stats, W=W, S=S.moduli)
    raise NoValidRoot(f"no usable root of V after {cfg.max_attempts} attempts")


def _stage1(cfg: RunConfig, plan: Plan, s: SymFunc, bits: int, cache, stats):
    vec, S = _crt_stage("V", plan, cfg, bits, s, cache, stats, plan.m, "stage1")
    V = vec + [1]
    if not split_check(V, cfg.q):
        raise NoValidRoot("V mod q does not split; height bound violated")
    t0 = time.perf_counter()
    y = _choose_y(V, cfg.q, cfg.seed)
    stats.t_root += time.perf_counter() - t0
    return V, y, S


def algorithm2(cfg: RunConfig, plan: Plan | None = None) -> CMResult:
    plan = plan or _prepare(cfg)
    stats = Stats()
    cache: dict[int, int] = {}
    for attempt, s in _symfuncs(cfg, plan):
        stats.retries = attempt
        bits = stage_bound(height_bits(plan, s), plan.m, cfg.q, "A2")
        stats.bound_bits = bits
        V, y, S = _stage1(cfg, plan, s, bits, cache, stats)
        if y is None:
            continue
        n_w = plan.n - 1 if s.shortcut else plan.n
        w, S = _crt_stage("w", plan, cfg, bits, s, cache, stats, n_w, "stage2", extra=y)
        return _finish(cfg, plan, s, V, y, w, stats, w=w, S=S.moduli)
    raise NoValidRoot(f"no usable root of V after {cfg.max_attempts} attempts")


def algorithm2_largeq(cfg: RunConfig, plan: Plan | None = None) -> CMResult:
    plan = plan or _prepare(cfg)
    stats = Stats()
    cache: dict[int, int] = {}
    q = cfg.q
    for attempt, s in _symfuncs(cfg, plan):
        stats.retries = attempt
        bits = stage_bound(height_bits(plan, s), plan.m, q, "A2L")
        stats.bound_bits = bits
        V, y, S = _stage1(cfg, plan, s, bits, cache, stats)
        if y is None:
            continue
        powers = [1]
        for _ in range(plan.m - 1):
            powers.append(powers[-1] * y % q)
        n_w = plan.n - 1 if s.shortcut else plan.n
        w, S = _crt_stage("wL", plan, cfg, bits, s, cache, stats, n_w, "stage2",
                          extra=powers)
        return _finish(cfg, plan, s, V, y, w, stats, w=w, S=S.moduli)
    raise NoValidRoot(f"no usable root of V after {cfg.max_attempts} attempts")


def construct(cfg: RunConfig) -> CMResult:
    return {"A1": algorithm1, "A2": algorithm2, "A2L": algorithm2_largeq}[cfg.algorithm](cfg)


# ---------------------------------------------------------------- over Z

def decompose_over_Z(D: int, order: int | None = None, subgroup=None, s_policy: str = "e1",
                     seed: int = 0, modpoly_dir=None,
                     threads: int = 1) -> tuple[Plan, SymFunc, list[int], list[list[int]]]:
    """V and W_k with integer coefficients (plain CRT over the primes in S)."""
    if order is None and subgroup is None:
        order = plan_order_trivial(D)
    plan = make_plan(D, order, subgroup, None, modpoly_dir)
    s = decomp.choose_symfunc(plan.n, plan.m, 0, seed, s_policy)
    bits = height_bits(plan, s)
    n_w = plan.n - 1 if s.shortcut else plan.n
    exclude: set[int] = set()
    while True:
        S = select_primes(D, bits, plan.P.norms, exclude=exclude)
        rows: list[list[int]] = [None] * len(S)  # type: ignore[list-item]

        def sink(i, vec):
            rows[i] = vec
        rejected = _run_primes("A1", plan, S, s, seed, {}, sink, Stats(), threads)
        if not rejected:
            break
        exclude |= set(rejected)
    vec = crt_vectors(rows, S.moduli)
    V, W = _unpack_A1(vec, plan.m, n_w)
    return plan, s, V, W


def plan_order_trivial(D: int) -> int:
    from .qform import class_number
    return class_number(D)


def hilbert_over_Z(D: int, modpoly_dir=None, threads: int = 1) -> list[int]:
    """Integer coefficients of H_D, constant term first."""
    _check_D(D)
    h = plan_order_trivial(D)
    plan, s, V, W = decompose_over_Z(D, order=h, s_policy="e1", modpoly_dir=modpoly_dir,
                                     threads=threads)
    # m = 1: V = Y - y_1 and W_k = theta_k, so U = H_D with X^(h-1) coefficient -y_1
    y1 = -V[0]
    coeffs = [wk[0] for wk in W]
    coeffs.append(-y1)
    return coeffs + [1]


def hilbert_mod(D: int, q: int, modpoly_dir=None) -> list[int]:
    return [c % q for c in hilbert_over_Z(D, modpoly_dir)]
