"""Mechanical checks of individual rationality, incentive compatibility, budget
balance and revenue dominance.

Small instances are checked exhaustively: every connected graph up to a few
agents, every valuation assignment from a grid, every buyer and every
deviation (bid from a covering grid x diffusion subset, or null). Larger
instances are sampled. All arithmetic is exact, so a reported
counterexample is a real one.
"""
from __future__ import annotations

import itertools
import os
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Optional, Sequence

from .generators import random_network, random_profile, uniform_action
from .graph import (
    DiffusionAnalysis,
    build_diffusion_graph,
    critical_nodes_oracle_all,
    dominator_analysis,
    same_critical_nodes,
)
from .mechanisms import BuyerStatus, MechanismKind, Outcome, format_value, idm, idm_revenue_bound, run, second_price_local, vcg_network
from .model import (
    ActionProfile,
    Bid,
    SocialNetwork,
    Value,
    as_value,
    feasibility_transform,
    truthful_profile,
    utility,
)

MAX_STORED = 25

_MECHANISMS = {MechanismKind.SPL: second_price_local, MechanismKind.VCG: vcg_network, MechanismKind.IDM: idm}


def default_processes() -> int:
    env = os.environ.get("DIFFAUCTION_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


# --------------------------------------------------------------------------
# deviation space and reports


@dataclass(frozen=True)
class DeviationSpace:
    """Finite stand-in for a buyer's action space.

    ``diffusion_samples=None`` means every subset of the neighbor set;
    otherwise that many random subsets (plus the full set and the empty set).
    """

    valuation_grid: tuple[Value, ...]
    diffusion_samples: Optional[int] = None
    seed: int = 0
    include_null: bool = True

    @classmethod
    def covering(cls, net: SocialNetwork, base_grid: Iterable = (), **kwargs) -> "DeviationSpace":
        """Grid that crosses every allocation boundary of ``net``.

        Utilities are constant between consecutive distinct bids, so the
        values, the midpoints between them and one value above the top are
        enough.
        """
        return cls(covering_grid([*base_grid, *(net.valuations[i] for i in net.buyers)]), **kwargs)

    def subsets(self, nbrs: Iterable[int], rng: Optional[random.Random] = None) -> list[frozenset[int]]:
        nbrs = sorted(nbrs)
        if self.diffusion_samples is None or 2 ** len(nbrs) <= self.diffusion_samples + 2:
            return [
                frozenset(c) for k in range(len(nbrs) + 1) for c in itertools.combinations(nbrs, k)
            ]
        rng = rng or random.Random(self.seed)
        out = {frozenset(), frozenset(nbrs)}
        while len(out) < self.diffusion_samples + 2:
            out.add(frozenset(j for j in nbrs if rng.random() < 0.5))
        return sorted(out, key=lambda s: (len(s), sorted(s)))


def covering_grid(values: Iterable) -> tuple[Value, ...]:
    pts = sorted({as_value(v) for v in values} | {0})
    mids = [as_value(Fraction(a + b, 2)) for a, b in zip(pts, pts[1:])]
    return tuple(sorted(set(pts) | set(mids) | {pts[-1] + 1}))


@dataclass
class Counterexample:
    scenario: SocialNetwork
    buyer: int
    truthful_utility: Value
    deviation: Optional[Bid]
    deviating_utility: Value
    note: str = ""
    others: Optional[ActionProfile] = None

    def to_dict(self) -> dict:
        from .scenario import network_to_dict

        if self.deviation is None:
            dev = None
        else:
            dev = {"bid": format_value(self.deviation.value), "diffusion_set": sorted(self.deviation.diffusion)}
        out = {
            "scenario": network_to_dict(self.scenario, self.others),
            "buyer": self.buyer,
            "truthful_utility": format_value(self.truthful_utility),
            "deviation": dev,
            "deviating_utility": format_value(self.deviating_utility),
        }
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class VerificationReport:
    """Outcome of checking one property for one mechanism.

    ``asserted`` is False for properties that are known not to hold (budget
    balance of network VCG); their violations are recorded, not failures.
    """

    property: str
    mechanism: Optional[MechanismKind]
    instances_checked: int = 0
    deviations_checked: int = 0
    violations: int = 0
    counterexamples: list[Counterexample] = field(default_factory=list)
    asserted: bool = True

    @property
    def holds(self) -> bool:
        return self.violations == 0

    @property
    def passed(self) -> bool:
        return self.holds or not self.asserted

    def add(self, cx: Counterexample) -> None:
        self.violations += 1
        if len(self.counterexamples) < MAX_STORED:
            self.counterexamples.append(cx)

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        self.instances_checked += other.instances_checked
        self.deviations_checked += other.deviations_checked
        self.violations += other.violations
        room = MAX_STORED - len(self.counterexamples)
        self.counterexamples.extend(other.counterexamples[:max(room, 0)])
        return self

    @property
    def name(self) -> str:
        return self.property if self.mechanism is None else f"{self.property}[{self.mechanism.value}]"

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "mechanism": None if self.mechanism is None else self.mechanism.value,
            "asserted": self.asserted,
            "holds": self.holds,
            "instances_checked": self.instances_checked,
            "deviations_checked": self.deviations_checked,
            "violations": self.violations,
            "counterexamples": [c.to_dict() for c in self.counterexamples],
        }

    def summary_line(self) -> str:
        if self.holds:
            verdict = "PASS"
        else:
            verdict = "FAIL" if self.asserted else "VIOLATED (expected)"
        return (
            f"{self.name:<28} {verdict:<20} instances={self.instances_checked:<9} "
            f"deviations={self.deviations_checked:<11} violations={self.violations}"
        )


def _report(prop, kind=None, asserted=True) -> VerificationReport:
    return VerificationReport(prop, kind, asserted=asserted)


# --------------------------------------------------------------------------
# per-scenario audit


class _Structures:
    """Feasible participant sets and dominator analyses keyed by (buyer, diffusion subset).

    With truthful others these depend on topology only, so a cache can be
    shared across every valuation assignment of the same graph.
    """

    def __init__(self, net: SocialNetwork, base: ActionProfile, cache: Optional[dict] = None):
        self.net = net
        self.base = base
        self.cache = {} if cache is None else cache

    def get(self, i: int, diffusion: Optional[frozenset]) -> tuple[frozenset, Optional[DiffusionAnalysis]]:
        key = (i, diffusion)
        hit = self.cache.get(key)
        if hit is None:
            action = None if diffusion is None else Bid(0, diffusion)
            prof = feasibility_transform(self.net, self.base.replace(i, action))
            parts = frozenset(prof.participants())
            an = dominator_analysis(build_diffusion_graph(self.net, prof)) if parts else None
            hit = self.cache[key] = (parts, an)
        return hit

    def profile(self, parts: frozenset, i: int, action: Optional[Bid]) -> ActionProfile:
        acts = [a if j in parts else None for j, a in enumerate(self.base.actions)]
        acts[i] = action
        return ActionProfile(tuple(acts), True)


def _winner_chain(out: Outcome) -> tuple[int, ...]:
    if out.winner is None:
        return ()
    seq = out.top_sequence
    return seq[: seq.index(out.winner) + 1]


@dataclass
class ScenarioAudit:
    reports: dict[str, VerificationReport]

    def merge(self, other: "ScenarioAudit") -> "ScenarioAudit":
        for key, rep in other.reports.items():
            if key in self.reports:
                self.reports[key].merge(rep)
            else:
                self.reports[key] = rep
        return self


def _new_reports(kinds: Sequence[MechanismKind]) -> dict[str, VerificationReport]:
    reps = {}
    for k in kinds:
        reps[f"IR[{k.value}]"] = _report("IR", k)
        reps[f"IC[{k.value}]"] = _report("IC", k)
    reps["monotone-dependent-set"] = _report("monotone-dependent-set")
    if MechanismKind.IDM in kinds:
        reps["unlucky-zero-utility"] = _report("unlucky-zero-utility", MechanismKind.IDM)
        reps["off-chain-stays-off"] = _report("off-chain-stays-off", MechanismKind.IDM)
    return reps


def audit_profile(
    net: SocialNetwork,
    kinds: Sequence[MechanismKind],
    space: DeviationSpace,
    others: Optional[ActionProfile] = None,
    buyers: Optional[Iterable[int]] = None,
    cache: Optional[dict] = None,
) -> ScenarioAudit:
    """Check every deviation of every buyer against the truthful action.

    ``others`` holds the other buyers' intended actions (default: truthful);
    each buyer's own slot is overwritten. Deviating profiles always go
    through the feasibility transform.
    """
    truthful_acts = truthful_profile(net)
    base = truthful_acts if others is None else others
    if others is not None and cache is not None:
        raise ValueError("structure cache is only valid with truthful others")
    st = _Structures(net, base, cache)
    reps = _new_reports(kinds)
    grid = space.valuation_grid
    rng = random.Random(space.seed)
    truthful_cache: dict[frozenset, dict] = {}
    ic_rep = {k: reps[f"IC[{k.value}]"] for k in kinds}
    ir_rep = {k: reps[f"IR[{k.value}]"] for k in kinds}
    idm_kind = MechanismKind.IDM

    for i in (net.buyers if buyers is None else buyers):
        full = net.neighbors[i]
        v_true = net.valuations[i]
        parts_t, an_t = st.get(i, full)
        if i not in parts_t:
            continue  # i never hears of the auction under these others
        truth_action = Bid(v_true, full)
        prof_t = st.profile(parts_t, i, truth_action)
        key_t = prof_t.actions
        if key_t not in truthful_cache:
            truthful_cache[key_t] = {k: run(k, net, prof_t, analysis=an_t) for k in kinds}
        out_t = truthful_cache[key_t]
        u_t = {k: utility(net, i, out_t[k]) for k in kinds}
        for k in kinds:
            ir_rep[k].instances_checked += 1
            ic_rep[k].instances_checked += 1
        idm_t = out_t.get(MechanismKind.IDM)
        unlucky = idm_t is not None and idm_t.status[i] is BuyerStatus.UNLUCKY
        off_chain = idm_t is not None and i not in _winner_chain(idm_t)
        if idm_t is not None:
            reps["unlucky-zero-utility"].instances_checked += int(unlucky)
            reps["off-chain-stays-off"].instances_checked += int(off_chain)

        per_kind = [(k, _MECHANISMS[k], ic_rep[k], ir_rep[k], u_t[k]) for k in kinds]
        subsets = space.subsets(full, rng)
        dep_of: dict[frozenset, frozenset] = {}
        deviations: list[tuple[Optional[frozenset], Sequence]] = [(r, grid) for r in subsets]
        if space.include_null:
            deviations.append((None, (None,)))
        for diffusion, bids in deviations:
            parts, an = st.get(i, diffusion)
            if diffusion is not None:
                dep_of[diffusion] = an.dependent_set[i]
            truthful_bid = diffusion is not None
            for v in bids:
                action = None if diffusion is None else Bid(v, diffusion)
                prof = st.profile(parts, i, action)
                shown = prof if others is not None else None
                at_truth = truthful_bid and v == v_true
                for k, fn, ic, ir, u_truth in per_kind:
                    out = fn(net, prof, analysis=an)
                    u = utility(net, i, out)
                    ic.deviations_checked += 1
                    if u > u_truth:
                        ic.add(Counterexample(net, i, u_truth, action, u, "profitable deviation", shown))
                    if at_truth:
                        ir.deviations_checked += 1
                        if u < 0:
                            ir.add(Counterexample(net, i, u_truth, action, u, "negative utility when bidding truthfully", shown))
                    if k is idm_kind:
                        if unlucky:
                            rep = reps["unlucky-zero-utility"]
                            rep.deviations_checked += 1
                            if u != 0:
                                rep.add(Counterexample(net, i, u_truth, action, u, "unlucky buyer changed her utility", shown))
                        if off_chain and at_truth:
                            rep = reps["off-chain-stays-off"]
                            rep.deviations_checked += 1
                            if i in _winner_chain(out):
                                rep.add(Counterexample(net, i, u_truth, action, u, "joined the winner's chain by diffusing less", shown))

        rep = reps["monotone-dependent-set"]
        rep.instances_checked += 1
        for small, large in itertools.combinations(sorted(dep_of, key=len), 2):
            if small <= large:
                rep.deviations_checked += 1
                if not dep_of[small] <= dep_of[large]:
                    rep.add(
                        Counterexample(
                            net, i, 0, Bid(v_true, small), 0,
                            f"d_i shrank: {sorted(dep_of[small])} under {sorted(small)} "
                            f"vs {sorted(dep_of[large])} under {sorted(large)}",
                        )
                    )
    return ScenarioAudit(reps)


def check_IC(
    net: SocialNetwork,
    mechanism: MechanismKind,
    space: Optional[DeviationSpace] = None,
    others_samples: int = 0,
    seed: int = 0,
    grid: Sequence = (),
) -> VerificationReport:
    """Does any buyer gain by deviating from the truthful action?

    Others play truthfully, and additionally ``others_samples`` uniformly
    drawn profiles from ``grid`` x subsets x null.
    """
    kind = MechanismKind(mechanism)
    if space is None:
        space = DeviationSpace.covering(net, grid)
    rep = audit_profile(net, [kind], space).reports[f"IC[{kind.value}]"]
    for others in _sample_others(net, others_samples, seed, grid or space.valuation_grid):
        rep.merge(audit_profile(net, [kind], space, others=others).reports[f"IC[{kind.value}]"])
    return rep


def check_IR(
    net: SocialNetwork,
    mechanism: MechanismKind,
    diffusion_samples: Optional[int] = None,
    others_samples: int = 0,
    seed: int = 0,
    grid: Sequence = (),
) -> VerificationReport:
    """Truthful bid, any diffusion subset: is utility always non-negative?"""
    kind = MechanismKind(mechanism)
    space = DeviationSpace(tuple(sorted({net.valuations[i] for i in net.buyers})), diffusion_samples, seed, False)
    rep = audit_profile(net, [kind], space).reports[f"IR[{kind.value}]"]
    for others in _sample_others(net, others_samples, seed, grid or space.valuation_grid):
        rep.merge(audit_profile(net, [kind], space, others=others).reports[f"IR[{kind.value}]"])
    return rep


def _sample_others(net, count, seed, grid) -> Iterator[ActionProfile]:
    rng = random.Random(seed)
    for _ in range(count):
        acts = [None if i == net.seller else uniform_action(net, i, rng, grid) for i in range(net.n)]
        yield ActionProfile(tuple(acts))


# --------------------------------------------------------------------------
# budget balance and revenue dominance


@dataclass(frozen=True)
class RevenueComparison:
    idm: Value
    vcg: Value
    spl: Value
    idm_bound: Value
    idm_welfare: Value = 0
    spl_welfare: Value = 0

    def as_tuple(self) -> tuple[Value, Value, Value]:
        return (self.idm, self.vcg, self.spl)

    def violations(self, truthful: bool = True) -> list[str]:
        bad = []
        if self.idm < self.vcg:
            bad.append("rev_IDM < rev_VCG")
        if self.idm < 0:
            bad.append("rev_IDM < 0")
        if self.idm != self.idm_bound:
            bad.append("rev_IDM != best bid outside d_first")
        if truthful:
            if self.idm < self.spl:
                bad.append("rev_IDM < rev_SPL")
            if self.idm_welfare < self.spl_welfare:
                bad.append("welfare_IDM < welfare_SPL")
        return bad


def check_revenue_dominance(net: SocialNetwork, profile: Optional[ActionProfile] = None) -> RevenueComparison:
    """Revenues of IDM, network VCG and local second price on one feasible profile."""
    if profile is None:
        profile = truthful_profile(net)
    if not profile.participants():
        return RevenueComparison(0, 0, 0, 0)
    an = dominator_analysis(build_diffusion_graph(net, profile))
    o_idm = run(MechanismKind.IDM, net, profile, analysis=an)
    o_vcg = run(MechanismKind.VCG, net, profile, analysis=an)
    o_spl = run(MechanismKind.SPL, net, profile, analysis=an)
    return RevenueComparison(
        o_idm.revenue,
        o_vcg.revenue,
        o_spl.revenue,
        idm_revenue_bound(net, profile, o_idm, an),
        o_idm.welfare,
        o_spl.welfare,
    )


def check_WBB(
    net: Optional[SocialNetwork] = None,
    mechanism: MechanismKind = MechanismKind.IDM,
    profile_sampler: Optional[Callable[[random.Random], tuple[SocialNetwork, ActionProfile]]] = None,
    trials: int = 1,
    seed: int = 0,
) -> VerificationReport:
    """Revenue >= 0 on sampled feasible profiles (or on ``net``'s truthful profile).

    Network VCG is not budget balanced; its violations are recorded with
    ``asserted=False``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    kind = MechanismKind(mechanism)
    rep = _report("WBB", kind, asserted=kind is not MechanismKind.VCG)
    rng = random.Random(seed)
    for _ in range(trials if profile_sampler is not None else 1):
        if profile_sampler is not None:
            net_t, prof = profile_sampler(rng)
        else:
            if net is None:
                raise ValueError("need a network or a profile sampler")
            net_t, prof = net, truthful_profile(net)
        out = run(kind, net_t, prof)
        rep.instances_checked += 1
        if out.revenue < 0:
            rep.add(Counterexample(net_t, -1, 0, None, out.revenue, f"revenue {format_value(out.revenue)}", prof))
    return rep


def truthful_sampler(n_max: int = 50, grid: Sequence = tuple(range(11))):
    def sample(rng: random.Random):
        net = random_network(rng, n_max, grid)
        return net, truthful_profile(net)

    return sample


def random_profile_sampler(n_max: int = 50, grid: Sequence = tuple(range(11))):
    def sample(rng: random.Random):
        net = random_network(rng, n_max, grid)
        return net, random_profile(net, rng, grid)

    return sample


def dominance_campaign(
    trials: int = 10_000,
    seed: int = 0,
    n_max: int = 50,
    grid: Sequence = tuple(range(11)),
    deadline: Optional[float] = None,
) -> tuple[VerificationReport, bool]:
    """Revenue dominance and the IDM revenue identity on random truthful instances.

    Returns the report and whether all ``trials`` ran before ``deadline``.
    """
    rep = _report("revenue-dominance", MechanismKind.IDM)
    rng = random.Random(seed)
    sample = truthful_sampler(n_max, grid)
    for _ in range(trials):
        if deadline is not None and time.monotonic() > deadline:
            return rep, False
        net, prof = sample(rng)
        cmp = check_revenue_dominance(net, prof)
        rep.instances_checked += 1
        rep.deviations_checked += 1
        bad = cmp.violations(truthful=True)
        if bad:
            rep.add(Counterexample(net, -1, cmp.idm, None, cmp.vcg, "; ".join(bad)))
    return rep, True


def dominator_campaign(trials: int = 500, seed: int = 0, n_max: int = 200) -> VerificationReport:
    """Dominator analysis vs the node-removal oracle on random feasible profiles."""
    rep = _report("dominator-oracle")
    rng = random.Random(seed)
    for _ in range(trials):
        net = random_network(rng, n_max, (0, 1, 2, 3))
        # mostly-forwarding profiles keep most of the graph in play
        prof = random_profile(net, rng, (0, 1, 2, 3), null_prob=0.05, keep_prob=rng.uniform(0.6, 1.0))
        g = build_diffusion_graph(net, prof)
        an = dominator_analysis(g)
        oracle = critical_nodes_oracle_all(g)
        rep.instances_checked += 1
        rep.deviations_checked += len(oracle)
        bad = same_critical_nodes(an, oracle)
        if bad:
            rep.add(Counterexample(net, bad[0], 0, None, 0, f"mismatch on {bad[:10]}", prof))
    return rep


# --------------------------------------------------------------------------
# exhaustive enumeration


def enumerate_topologies(
    n_max: int,
    n_min: int = 2,
    seller_degree_min: int = 1,
    up_to_isomorphism: bool = False,
) -> Iterator[tuple[int, tuple[tuple[int, int], ...]]]:
    """Connected graphs on ``n_min..n_max`` labeled agents with seller 0.

    With ``up_to_isomorphism`` only one representative per class of
    relabelings fixing the seller is produced. Order is deterministic.
    """
    for n in range(max(n_min, 2), n_max + 1):
        pairs = list(itertools.combinations(range(n), 2))
        seen: set = set()
        perms = [(0, *p) for p in itertools.permutations(range(1, n))] if up_to_isomorphism else None
        for mask in range(1, 2 ** len(pairs)):
            edges = tuple(p for b, p in enumerate(pairs) if mask >> b & 1)
            if sum(1 for a, b in edges if a == 0) < seller_degree_min:
                continue
            if not _connected(n, edges):
                continue
            if perms is not None:
                canon = min(tuple(sorted(tuple(sorted((p[a], p[b]))) for a, b in edges)) for p in perms)
                if canon in seen:
                    continue
                seen.add(canon)
            yield n, edges


def _connected(n: int, edges, root: int = 0) -> bool:
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = {root}
    stack = [root]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n


def enumerate_connected_networks(
    n_max: int,
    valuation_grid: Sequence,
    seller_degree_min: int = 1,
    up_to_isomorphism: bool = False,
    n_min: int = 2,
) -> Iterator[SocialNetwork]:
    """Every connected topology crossed with every buyer valuation assignment."""
    grid = [as_value(v) for v in valuation_grid]
    for n, edges in enumerate_topologies(n_max, n_min, seller_degree_min, up_to_isomorphism):
        for vals in itertools.product(grid, repeat=n - 1):
            yield SocialNetwork.from_edges(n, edges, [0, *vals])


@dataclass
class SweepResult:
    reports: dict[str, VerificationReport]
    scenarios: int
    topologies: int
    complete: bool
    elapsed: float

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports.values())

    def to_dict(self) -> dict:
        return {
            "scenarios": self.scenarios,
            "topologies": self.topologies,
            "complete": self.complete,
            "elapsed_seconds": round(self.elapsed, 3),
            "passed": self.passed,
            "reports": [r.to_dict() for r in self.reports.values()],
        }


def _sweep_topology(args) -> tuple[ScenarioAudit, int]:
    n, edges, grid, kinds, base_grid = args
    cache: dict = {}
    total: Optional[ScenarioAudit] = None
    count = 0
    for vals in itertools.product(grid, repeat=n - 1):
        net = SocialNetwork.from_edges(n, edges, [0, *vals])
        space = DeviationSpace.covering(net, base_grid)
        audit = audit_profile(net, kinds, space, cache=cache)
        total = audit if total is None else total.merge(audit)
        count += 1
    return total, count


def exhaustive_sweep(
    n_max: int = 5,
    grid: Sequence = (0, 1, 2, 3),
    kinds: Sequence[MechanismKind] = (MechanismKind.VCG, MechanismKind.IDM),
    up_to_isomorphism: bool = False,
    processes: Optional[int] = None,
    time_limit: Optional[float] = None,
    n_min: int = 2,
    progress: Optional[Callable[[int, int], None]] = None,
) -> SweepResult:
    """IC/IR, unlucky-buyer and structural checks over every small connected network.

    Deviation bids come from the covering grid of each scenario (all grid
    values, midpoints, one above the top). Work is split by topology and
    run on ``processes`` workers.
    """
    grid = tuple(as_value(v) for v in grid)
    kinds = tuple(MechanismKind(k) for k in kinds)
    topologies = list(enumerate_topologies(n_max, n_min, 1, up_to_isomorphism))
    jobs = [(n, edges, grid, kinds, grid) for n, edges in topologies]
    processes = processes or default_processes()
    start = time.monotonic()
    total = ScenarioAudit(_new_reports(kinds))
    scenarios = done = 0
    complete = True

    def consume(results):
        nonlocal scenarios, done, complete
        for audit, count in results:
            total.merge(audit)
            scenarios += count
            done += 1
            if progress is not None:
                progress(done, len(jobs))
            if time_limit is not None and time.monotonic() - start > time_limit:
                complete = done == len(jobs)
                return

    if processes > 1 and len(jobs) > 1:
        import multiprocessing as mp

        # big topologies first so the tail is short
        jobs.sort(key=lambda j: (-j[0], -len(j[1])))
        with mp.get_context("fork").Pool(processes) as pool:
            consume(pool.imap_unordered(_sweep_topology, jobs, chunksize=1))
            pool.terminate()
    else:
        consume(map(_sweep_topology, jobs))
    return SweepResult(total.reports, scenarios, len(topologies), complete, time.monotonic() - start)


# --------------------------------------------------------------------------
# counterexample shrinking


def _remove_agent(net: SocialNetwork, k: int) -> Optional[SocialNetwork]:
    keep = [i for i in range(net.n) if i != k]
    index = {old: new for new, old in enumerate(keep)}
    edges = [(index[a], index[b]) for a, b in net.edges() if k not in (a, b)]
    if not _connected(len(keep), edges, index[net.seller]):
        return None
    return SocialNetwork.from_edges(
        len(keep), edges, [net.valuations[i] for i in keep], seller=index[net.seller],
        labels=None if net.labels is None else [net.labels[i] for i in keep],
    )


def minimize_counterexample(cx: Counterexample, kind: MechanismKind, base_grid: Sequence = ()) -> Counterexample:
    """Greedily drop agents, then lower valuations, while an IC/IR violation for the buyer persists."""
    kind = MechanismKind(kind)

    def failing(net: SocialNetwork, buyer: int) -> Optional[Counterexample]:
        space = DeviationSpace.covering(net, base_grid)
        reps = audit_profile(net, [kind], space, buyers=[buyer]).reports
        for key in (f"IC[{kind.value}]", f"IR[{kind.value}]"):
            if reps[key].counterexamples:
                return reps[key].counterexamples[0]
        return None

    current = failing(cx.scenario, cx.buyer) or cx
    changed = True
    while changed:
        changed = False
        net, buyer = current.scenario, current.buyer
        for k in range(net.n):
            if k in (net.seller, buyer):
                continue
            small = _remove_agent(net, k)
            if small is None:
                continue
            found = failing(small, buyer - (k < buyer))
            if found is not None:
                current, changed = found, True
                break
        if changed:
            continue
        for k in net.buyers:
            for lower in sorted({0, *base_grid, *net.valuations}):
                if lower >= net.valuations[k]:
                    break
                vals = list(net.valuations)
                vals[k] = lower
                found = failing(SocialNetwork(net.neighbors, tuple(vals), net.seller, net.seller_reserve, net.labels), buyer)
                if found is not None:
                    current, changed = found, True
                    break
            if changed:
                break
    return current


# --------------------------------------------------------------------------
# sweeps over the others' actions


def _action_space(nbrs: Sequence[int], grid: Sequence[Value]) -> list[Optional[Bid]]:
    nbrs = sorted(nbrs)
    subsets = [frozenset(c) for k in range(len(nbrs) + 1) for c in itertools.combinations(nbrs, k)]
    return [None, *(Bid(v, r) for v in grid for r in subsets)]


def others_sweep(
    n_max: int = 4,
    grid: Sequence = (0, 1, 2),
    kinds: Sequence[MechanismKind] = (MechanismKind.VCG, MechanismKind.IDM),
    up_to_isomorphism: bool = True,
    n_min: int = 2,
) -> SweepResult:
    """IC/IR against every action profile of the other buyers, not just the truthful one.

    For each topology, buyer ``i`` and true value of ``i`` from ``grid``,
    the others range over grid bids x diffusion subsets x null (the raw
    intentions; the feasibility transform is applied after ``i`` acts).
    The others' own valuations never enter ``i``'s utility, so they are
    left at 0.
    """
    grid = tuple(as_value(v) for v in grid)
    kinds = tuple(MechanismKind(k) for k in kinds)
    start = time.monotonic()
    total = ScenarioAudit(_new_reports(kinds))
    scenarios = topologies = 0
    for n, edges in enumerate_topologies(n_max, n_min, 1, up_to_isomorphism):
        topologies += 1
        shape = SocialNetwork.from_edges(n, edges, [0] * n)
        for i in shape.buyers:
            others = [j for j in shape.buyers if j != i]
            spaces = [_action_space(shape.neighbors[j], grid) for j in others]
            for v_i in grid:
                vals = [0] * n
                vals[i] = v_i
                net = SocialNetwork(shape.neighbors, tuple(vals))
                space = DeviationSpace.covering(net, grid)
                for combo in itertools.product(*spaces):
                    acts: list[Optional[Bid]] = [None] * n
                    for j, a in zip(others, combo):
                        acts[j] = a
                    total.merge(audit_profile(net, kinds, space, others=ActionProfile(tuple(acts)), buyers=[i]))
                    scenarios += 1
    return SweepResult(total.reports, scenarios, topologies, True, time.monotonic() - start)
