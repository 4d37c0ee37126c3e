"""Instance generators: the line network, seeded random graphs and random action profiles.

All generators put the seller at agent 0 and are deterministic given the seed.
"""
from __future__ import annotations

import random
from typing import Optional, Sequence

import networkx as nx

from .model import ActionProfile, Bid, SocialNetwork, as_value, feasibility_transform

DEFAULT_GRID = tuple(range(11))


def _rng(seed) -> random.Random:
    return seed if isinstance(seed, random.Random) else random.Random(seed)


def line_graph(length: int, values: Optional[Sequence] = None) -> SocialNetwork:
    """Seller at one end of a path of ``length`` buyers.

    By default every buyer values the item at 0 except the far end, who values it at 1.
    """
    if length < 1:
        raise ValueError("need at least one buyer")
    if values is None:
        values = [0] * (length - 1) + [1]
    if len(values) != length:
        raise ValueError("one value per buyer")
    return SocialNetwork.from_edges(
        length + 1, [(i, i + 1) for i in range(length)], [0, *values]
    )


def _from_nx(g: nx.Graph, rng: random.Random, grid: Sequence) -> SocialNetwork:
    grid = [as_value(v) for v in grid]
    n = g.number_of_nodes()
    vals = [0] + [rng.choice(grid) for _ in range(n - 1)]
    return SocialNetwork.from_edges(n, g.edges(), vals)


def _connect(g: nx.Graph, rng: random.Random) -> nx.Graph:
    """Join every component to the seller's with one random edge."""
    comps = sorted((sorted(c) for c in nx.connected_components(g)), key=lambda c: c[0])
    main = comps[0]
    for comp in comps[1:]:
        g.add_edge(rng.choice(main), rng.choice(comp))
        main = main + comp
    return g


def erdos_renyi(n: int, p: float, seed=None, grid: Sequence = DEFAULT_GRID) -> SocialNetwork:
    """G(n, p) on ``n`` agents, made connected by bridging stray components."""
    if n < 2:
        raise ValueError("need the seller and at least one buyer")
    rng = _rng(seed)
    g = nx.gnp_random_graph(n, p, seed=rng.getrandbits(32))
    return _from_nx(_connect(g, rng), rng, grid)


def random_tree(n: int, seed=None, grid: Sequence = DEFAULT_GRID) -> SocialNetwork:
    """Uniform random labeled tree on ``n`` agents."""
    if n < 2:
        raise ValueError("need the seller and at least one buyer")
    rng = _rng(seed)
    if n == 2:
        g = nx.path_graph(2)
    else:
        g = nx.from_prufer_sequence([rng.randrange(n) for _ in range(n - 2)])
    return _from_nx(g, rng, grid)


def random_network(rng: random.Random, n_max: int = 50, grid: Sequence = DEFAULT_GRID) -> SocialNetwork:
    """Coin flip between a random tree and a sparse-to-moderate G(n, p)."""
    n = rng.randint(2, n_max)
    if rng.random() < 0.5:
        return random_tree(n, rng, grid)
    p = rng.uniform(0.5, 3.0) / max(n - 1, 1)
    return erdos_renyi(n, min(p, 1.0), rng, grid)


def random_profile(
    net: SocialNetwork,
    rng: random.Random,
    grid: Sequence = DEFAULT_GRID,
    null_prob: float = 0.1,
    keep_prob: float = 0.7,
) -> ActionProfile:
    """Random feasible profile: each buyer goes null with ``null_prob``, else bids
    from ``grid`` and forwards to each neighbor with ``keep_prob``."""
    grid = [as_value(v) for v in grid]
    acts: list = [None] * net.n
    for i in net.buyers:
        if rng.random() < null_prob:
            continue
        diff = frozenset(j for j in sorted(net.neighbors[i]) if rng.random() < keep_prob)
        acts[i] = Bid(rng.choice(grid), diff)
    return feasibility_transform(net, ActionProfile(tuple(acts)))


def uniform_action(net: SocialNetwork, i: int, rng: random.Random, grid: Sequence):
    """Uniform draw from buyer ``i``'s finite action space grid x subsets + null."""
    nbrs = sorted(net.neighbors[i])
    size = len(grid) * 2 ** len(nbrs) + 1
    k = rng.randrange(size)
    if k == size - 1:
        return None
    v, mask = divmod(k, 2 ** len(nbrs))
    return Bid(as_value(grid[v]), frozenset(j for b, j in enumerate(nbrs) if mask >> b & 1))
