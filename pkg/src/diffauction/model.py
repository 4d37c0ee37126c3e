"""Agents, valuations, actions and the feasibility transform.

Values are exact numbers (``int`` or :class:`fractions.Fraction`) so that
payment identities and tie tests are bit-exact; :func:`as_value` quantizes
external input (decimal strings, floats) on the way in.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Iterable, Mapping, Optional, Sequence, Union

Value = Union[int, Fraction]


def as_value(x, precision: Optional[int] = None) -> Value:
    """Convert ``x`` to an exact value, optionally quantized to ``precision`` decimals.

    Accepts ints, Fractions, Decimals, decimal strings ("1.25", "3/4") and
    floats (floats go through their shortest repr, so 0.1 becomes 1/10).
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not valuations")
    if isinstance(x, float):
        x = repr(x)
    if isinstance(x, str):
        x = x.strip()
        if "/" in x:
            x = Fraction(x)
        else:
            x = Decimal(x)
    if isinstance(x, Decimal):
        if precision is not None:
            x = x.quantize(Decimal(1).scaleb(-precision))
        x = Fraction(x)
    elif precision is not None and isinstance(x, Rational):
        scale = 10 ** precision
        x = Fraction(round(Fraction(x) * scale), scale)
    if not isinstance(x, Rational):
        raise TypeError(f"cannot interpret {x!r} as an exact value")
    x = Fraction(x)
    return int(x) if x.denominator == 1 else x


@dataclass(frozen=True)
class SocialNetwork:
    """The true communication graph.

    ``valuations`` has one entry per agent; the seller's slot is ignored and
    her reserve lives in ``seller_reserve``. ``labels`` are display names.
    """

    neighbors: tuple[frozenset[int], ...]
    valuations: tuple[Value, ...]
    seller: int = 0
    seller_reserve: Value = 0
    labels: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        n = len(self.neighbors)
        if n < 1:
            raise ValueError("network needs at least the seller")
        if len(self.valuations) != n:
            raise ValueError("need one valuation per agent")
        if not 0 <= self.seller < n:
            raise ValueError("seller id out of range")
        for i, nbrs in enumerate(self.neighbors):
            if i in nbrs:
                raise ValueError(f"agent {i} lists itself as a neighbor")
            for j in nbrs:
                if not 0 <= j < n:
                    raise ValueError(f"agent {i} has unknown neighbor {j}")
                if i not in self.neighbors[j]:
                    raise ValueError(f"neighbor relation not symmetric: {i}-{j}")
            if n > 1 and not nbrs:
                raise ValueError(f"agent {i} has no neighbors")
        for i, v in enumerate(self.valuations):
            if v < 0:
                raise ValueError(f"agent {i} has a negative valuation")
        if self.seller_reserve < 0:
            raise ValueError("negative reserve")
        if self.labels is not None and len(self.labels) != n:
            raise ValueError("need one label per agent")

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        valuations: Union[Sequence, Mapping[int, object]],
        seller: int = 0,
        labels: Optional[Sequence[str]] = None,
        precision: Optional[int] = None,
    ) -> "SocialNetwork":
        nbrs: list[set[int]] = [set() for _ in range(n)]
        for a, b in edges:
            nbrs[a].add(b)
            nbrs[b].add(a)
        if isinstance(valuations, Mapping):
            vals = [valuations.get(i, 0) for i in range(n)]
        else:
            vals = list(valuations)
            if len(vals) == n - 1:
                # buyers only; slot the seller in
                vals.insert(seller, 0)
        vals[seller] = 0
        return cls(
            neighbors=tuple(frozenset(s) for s in nbrs),
            valuations=tuple(as_value(v, precision) for v in vals),
            seller=seller,
            labels=tuple(labels) if labels is not None else None,
        )

    @cached_property
    def n(self) -> int:
        return len(self.neighbors)

    @cached_property
    def buyers(self) -> tuple[int, ...]:
        return tuple(i for i in range(self.n) if i != self.seller)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((i, j) for i, nbrs in enumerate(self.neighbors) for j in nbrs if i < j)

    def label(self, i: Optional[int]) -> str:
        if i is None:
            return "-"
        if self.labels is not None:
            return self.labels[i]
        return "s" if i == self.seller else str(i)

    def index_of(self, label: str) -> int:
        if self.labels is not None and label in self.labels:
            return self.labels.index(label)
        return int(label)

    def is_connected(self) -> bool:
        return len(_bfs(self.seller, lambda i: self.neighbors[i])) == self.n


@dataclass(frozen=True)
class Bid:
    """A participating action: a reported valuation and a diffusion set."""

    value: Value
    diffusion: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("reported valuation must be non-negative")
        if not isinstance(self.diffusion, frozenset):
            object.__setattr__(self, "diffusion", frozenset(self.diffusion))


# ``None`` is the null action.
Action = Optional[Bid]


@dataclass(frozen=True)
class ActionProfile:
    """One action per agent id; the seller's slot is always ``None``.

    ``feasible`` is a cache filled in by the constructors in this module.
    """

    actions: tuple[Action, ...]
    feasible: Optional[bool] = None

    def __getitem__(self, i: int) -> Action:
        return self.actions[i]

    def __len__(self):
        return len(self.actions)

    def participants(self) -> list[int]:
        return [i for i, a in enumerate(self.actions) if a is not None]

    def bid(self, i: int) -> Optional[Value]:
        a = self.actions[i]
        return None if a is None else a.value

    def replace(self, i: int, action: Action) -> "ActionProfile":
        acts = list(self.actions)
        acts[i] = action
        return ActionProfile(tuple(acts))


def make_profile(net: SocialNetwork, actions: Union[Sequence[Action], Mapping[int, Action]]) -> ActionProfile:
    """Validate ``actions`` against ``net`` and return a profile with the feasibility flag set."""
    if isinstance(actions, Mapping):
        acts = [actions.get(i) for i in range(net.n)]
    else:
        acts = list(actions)
        if len(acts) != net.n:
            raise ValueError("need one action per agent (seller slot None)")
    if acts[net.seller] is not None:
        raise ValueError("the seller does not take an action")
    for i, a in enumerate(acts):
        if a is None:
            continue
        if not a.diffusion <= net.neighbors[i]:
            raise ValueError(f"buyer {i} diffuses to non-neighbors {sorted(a.diffusion - net.neighbors[i])}")
    profile = ActionProfile(tuple(acts))
    return ActionProfile(profile.actions, reachable(net, profile) >= set(profile.participants()))


def _bfs(start: int, succ) -> set[int]:
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in succ(u):
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return seen


def reachable(net: SocialNetwork, profile: ActionProfile) -> set[int]:
    """Buyers who receive the auction information under ``profile``.

    The seller tells all her neighbors; a buyer forwards only if she acts.
    Buyers with a null action are still *informed* (they are returned) but do
    not forward.
    """
    s = net.seller
    acts = profile.actions

    def succ(u):
        if u == s:
            return net.neighbors[s]
        a = acts[u]
        return () if a is None else a.diffusion

    out = _bfs(s, succ)
    out.discard(s)
    return out


def feasibility_transform(net: SocialNetwork, profile: ActionProfile) -> ActionProfile:
    """Force every buyer the information cannot reach to the null action."""
    informed = reachable(net, profile)
    acts = tuple(a if (a is not None and i in informed) else None for i, a in enumerate(profile.actions))
    if acts == profile.actions:
        return profile if profile.feasible else ActionProfile(acts, True)
    return ActionProfile(acts, True)


def is_feasible(net: SocialNetwork, profile: ActionProfile) -> bool:
    return reachable(net, profile) >= set(profile.participants())


def truthful_profile(net: SocialNetwork) -> ActionProfile:
    acts = [None if i == net.seller else Bid(net.valuations[i], net.neighbors[i]) for i in range(net.n)]
    return feasibility_transform(net, ActionProfile(tuple(acts)))


def forced_null(before: ActionProfile, after: ActionProfile) -> list[int]:
    """Buyers whose action was nulled by the feasibility transform."""
    return [i for i, (a, b) in enumerate(zip(before.actions, after.actions)) if a is not None and b is None]


def utility(net: SocialNetwork, buyer: int, outcome) -> Value:
    """Quasilinear utility of ``buyer`` under ``outcome``, using her true valuation."""
    if buyer == net.seller or not 0 <= buyer < net.n:
        raise ValueError(f"unknown buyer {buyer}")
    won = outcome.winner == buyer
    return (net.valuations[buyer] if won else 0) - outcome.payments[buyer]
