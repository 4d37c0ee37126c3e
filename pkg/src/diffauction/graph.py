"""Diffusion digraph, diffusion critical nodes and critical sequences.

A buyer ``i`` is critical for ``j`` exactly when ``i`` is a proper dominator of
``j`` in the diffusion digraph rooted at the seller. :func:`dominator_analysis`
computes all of them at once with the iterative algorithm of Cooper, Harvey
and Kennedy; :func:`critical_nodes_oracle` is the slow removal-based check it
is tested against.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .model import ActionProfile, SocialNetwork, _bfs, is_feasible


@dataclass(frozen=True)
class DiffusionGraph:
    """Who informed whom: ``i -> j`` iff ``i`` acts and ``j`` is in her diffusion set.

    Non-participants are not nodes of the graph; edges into them and into the
    seller are dropped.
    """

    n: int
    root: int
    out_edges: tuple[frozenset[int], ...]
    participants: frozenset[int]

    def nodes(self) -> list[int]:
        return [self.root, *sorted(self.participants)]

    def predecessors(self) -> list[list[int]]:
        preds: list[list[int]] = [[] for _ in range(self.n)]
        for u, outs in enumerate(self.out_edges):
            for v in outs:
                preds[v].append(u)
        return preds

    def reachable(self, removed: Optional[int] = None) -> set[int]:
        """Nodes reachable from the root when ``removed`` is deleted."""
        if removed == self.root:
            return set()
        out = self.out_edges
        if removed is None:
            return _bfs(self.root, lambda u: out[u])
        return _bfs(self.root, lambda u: [v for v in out[u] if v != removed])

    def information_flow_edges(self, analysis: Optional["DiffusionAnalysis"] = None) -> list[tuple[int, int]]:
        """Edges that can actually carry news: drops ``i -> j`` when ``j`` dominates ``i``.

        If every path to ``i`` passes ``j`` then ``j`` was informed first and
        the reverse edge is dead.
        """
        if analysis is None:
            analysis = dominator_analysis(self)
        edges = []
        for u, outs in enumerate(self.out_edges):
            for v in sorted(outs):
                if u != self.root and v in analysis.critical_of[u]:
                    continue
                edges.append((u, v))
        return edges


def build_diffusion_graph(net: SocialNetwork, profile: ActionProfile) -> DiffusionGraph:
    if not (profile.feasible or is_feasible(net, profile)):
        raise ValueError("profile is not feasible; apply feasibility_transform first")
    parts = frozenset(profile.participants())
    outs: list[frozenset[int]] = [frozenset()] * net.n
    outs[net.seller] = net.neighbors[net.seller] & parts
    for i in parts:
        outs[i] = profile.actions[i].diffusion & parts
    return DiffusionGraph(net.n, net.seller, tuple(outs), parts)


def critical_nodes_oracle(g: DiffusionGraph, j: int) -> set[int]:
    """Critical nodes of ``j`` by deleting each other participant in turn."""
    if j not in g.participants:
        raise ValueError(f"{j} is not a participant")
    return {i for i in g.participants if i != j and j not in g.reachable(removed=i)}


def critical_nodes_oracle_all(g: DiffusionGraph) -> dict[int, set[int]]:
    """Same as :func:`critical_nodes_oracle` for every participant, one sweep per removed node."""
    crit: dict[int, set[int]] = {j: set() for j in g.participants}
    for i in g.participants:
        seen = g.reachable(removed=i)
        for j in g.participants:
            if j != i and j not in seen:
                crit[j].add(i)
    return crit


@dataclass(frozen=True)
class DiffusionAnalysis:
    """Dominator-tree view of a diffusion graph.

    ``sequence[j]`` is j's critical sequence, root side first and ending in
    ``j``; ``dependent_set[i]`` is ``i`` plus everyone ``i`` is critical for.
    """

    n: int
    root: int
    idom: tuple[Optional[int], ...]
    sequence: dict[int, tuple[int, ...]]
    dependent_set: dict[int, frozenset[int]]

    @property
    def participants(self) -> frozenset[int]:
        return frozenset(self.sequence)

    @property
    def critical_of(self) -> dict[int, tuple[int, ...]]:
        return {j: seq[:-1] for j, seq in self.sequence.items()}

    def successor(self, seq: Sequence[int], i: int) -> Optional[int]:
        k = seq.index(i)
        return seq[k + 1] if k + 1 < len(seq) else None


def _reverse_postorder(g: DiffusionGraph) -> list[int]:
    order: list[int] = []
    seen = {g.root}
    stack = [(g.root, iter(sorted(g.out_edges[g.root])))]
    while stack:
        u, it = stack[-1]
        for v in it:
            if v not in seen:
                seen.add(v)
                stack.append((v, iter(sorted(g.out_edges[v]))))
                break
        else:
            stack.pop()
            order.append(u)
    order.reverse()
    return order


def dominator_analysis(g: DiffusionGraph) -> DiffusionAnalysis:
    rpo = _reverse_postorder(g)
    if len(rpo) != len(g.participants) + 1:
        raise ValueError("some participants are unreachable from the seller")
    number = {u: k for k, u in enumerate(rpo)}
    preds = g.predecessors()
    idom: list[Optional[int]] = [None] * g.n
    idom[g.root] = g.root

    def intersect(a: int, b: int) -> int:
        while a != b:
            while number[a] > number[b]:
                a = idom[a]
            while number[b] > number[a]:
                b = idom[b]
        return a

    changed = True
    while changed:
        changed = False
        for u in rpo[1:]:
            new = None
            for p in preds[u]:
                if idom[p] is None:
                    continue
                new = p if new is None else intersect(p, new)
            if new != idom[u]:
                idom[u] = new
                changed = True

    sequence: dict[int, tuple[int, ...]] = {}
    for u in rpo[1:]:
        # rpo visits a node after its immediate dominator
        parent = idom[u]
        sequence[u] = (sequence[parent] if parent != g.root else ()) + (u,)

    members: dict[int, set[int]] = {u: {u} for u in rpo[1:]}
    for u in reversed(rpo[1:]):
        parent = idom[u]
        if parent != g.root:
            members[parent] |= members[u]
    idom[g.root] = None
    return DiffusionAnalysis(
        n=g.n,
        root=g.root,
        idom=tuple(idom),
        sequence=sequence,
        dependent_set={u: frozenset(s) for u, s in members.items()},
    )


def analyze(net: SocialNetwork, profile: ActionProfile) -> DiffusionAnalysis:
    return dominator_analysis(build_diffusion_graph(net, profile))


def dependent_set_without(analysis: DiffusionAnalysis, i: int) -> frozenset[int]:
    """All buyers outside ``d_i``, participating or not."""
    if i not in analysis.dependent_set:
        raise ValueError(f"{i} is not a participant")
    return frozenset(range(analysis.n)) - {analysis.root} - analysis.dependent_set[i]


def to_dot(
    g: DiffusionGraph,
    analysis: Optional[DiffusionAnalysis] = None,
    labels: Optional[Sequence[str]] = None,
    name: str = "diffusion",
) -> str:
    """Graphviz text: information-flow edges solid, dominator tree dashed."""
    if analysis is None:
        analysis = dominator_analysis(g)

    def lab(u: int) -> str:
        if labels is not None:
            return labels[u]
        return "s" if u == g.root else str(u)

    lines = [f"digraph {name} {{", f'  "{lab(g.root)}" [shape=doublecircle];']
    for u in sorted(g.participants):
        lines.append(f'  "{lab(u)}";')
    for u, v in g.information_flow_edges(analysis):
        lines.append(f'  "{lab(u)}" -> "{lab(v)}";')
    for u in sorted(g.participants):
        p = analysis.idom[u]
        lines.append(f'  "{lab(p)}" -> "{lab(u)}" [style=dashed, color=gray, constraint=false];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def same_critical_nodes(analysis: DiffusionAnalysis, oracle: dict[int, Iterable[int]]) -> list[int]:
    """Participants on which the dominator result and the oracle disagree."""
    return sorted(j for j, crit in oracle.items() if set(analysis.critical_of.get(j, ())) != set(crit))
