"""Single-item auctions on a diffusion graph.

Three mechanisms share :func:`run`:

* ``SPL`` - second price among the seller's own neighbors, diffusion ignored;
* ``VCG`` - efficient allocation with Clarke payments where removing a buyer
  also removes everyone who depends on her for the news;
* ``IDM`` - the information diffusion mechanism: the item goes to the first
  buyer on the top bidder's critical sequence who is the best bid once her
  successor's dependents are gone, and the chain up to her is paid the
  price increases it causes.

All functions take a feasible profile. A precomputed
:class:`~diffauction.graph.DiffusionAnalysis` may be passed in to skip the
dominator computation (verification sweeps reuse it across bids).
"""
from __future__ import annotations

import enum
import random
from fractions import Fraction
from typing import Iterable, NamedTuple, Optional

from .graph import DiffusionAnalysis, analyze
from .model import ActionProfile, SocialNetwork, Value, is_feasible


class MechanismKind(enum.Enum):
    SPL = "spl"
    VCG = "vcg"
    IDM = "idm"

    @classmethod
    def parse(cls, name: str) -> "MechanismKind":
        aliases = {
            "second_price_local": cls.SPL,
            "second-price": cls.SPL,
            "network_vcg": cls.VCG,
            "networkvcg": cls.VCG,
        }
        key = name.strip().lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


class BuyerStatus(enum.Enum):
    WINNER = "Winner"
    ON_PATH = "OnPath"
    UNLUCKY = "Unlucky"
    NORMAL = "Normal"
    NON_PARTICIPANT = "NonParticipant"


class Outcome(NamedTuple):
    mechanism: MechanismKind
    winner: Optional[int]
    payments: tuple[Value, ...]
    revenue: Value
    welfare: Value
    status: tuple[Optional[BuyerStatus], ...]
    # IDM bookkeeping: the top bidder and her critical sequence
    top_bidder: Optional[int] = None
    top_sequence: tuple[int, ...] = ()

    def to_record(self, net: Optional[SocialNetwork] = None) -> dict:
        """Flat JSON/CSV-friendly view."""
        lab = net.label if net is not None else str
        buyers = net.buyers if net is not None else [i for i, s in enumerate(self.status) if s is not None]
        return {
            "mechanism": self.mechanism.value,
            "winner": None if self.winner is None else lab(self.winner),
            "payments": {lab(i): format_value(self.payments[i]) for i in buyers},
            "revenue": format_value(self.revenue),
            "welfare": format_value(self.welfare),
            "status": {lab(i): self.status[i].value for i in buyers},
        }


def format_value(v: Value) -> str:
    """Decimal string when finite, else ``p/q``."""
    v = Fraction(v)
    if v.denominator == 1:
        return str(v.numerator)
    d = v.denominator
    twos = fives = 0
    while d % 2 == 0:
        d //= 2
        twos += 1
    while d % 5 == 0:
        d //= 5
        fives += 1
    if d != 1:
        return f"{v.numerator}/{v.denominator}"
    places = max(twos, fives)
    scaled = v * 10 ** places
    sign = "-" if scaled < 0 else ""
    digits = str(abs(scaled.numerator)).rjust(places + 1, "0")
    return f"{sign}{digits[:-places]}.{digits[-places:]}"


def best_bid(net: SocialNetwork, profile: ActionProfile, among: Iterable[int]) -> Value:
    """Highest report among the participating members of ``among``; the reserve if none."""
    best = net.seller_reserve
    acts = profile.actions
    for i in among:
        a = acts[i]
        if a is not None and a.value > best:
            best = a.value
    return best


def _ranked(profile: ActionProfile) -> list[tuple[Value, int]]:
    """Participants as (bid, -id), highest bid first and lowest id first among ties."""
    return sorted(((a.value, -i) for i, a in enumerate(profile.actions) if a is not None), reverse=True)


def _best_outside(ranked: list[tuple[Value, int]], excluded: frozenset[int], reserve: Value) -> Value:
    for v, neg in ranked:
        if -neg not in excluded:
            return v if v > reserve else reserve
    return reserve


def _top(ranked, profile, rng) -> Optional[int]:
    if not ranked:
        return None
    if rng is None:
        return -ranked[0][1]
    return top_bidder(profile, (-neg for _, neg in ranked), rng)


def _best_excluding(net: SocialNetwork, profile: ActionProfile, excluded: frozenset[int]) -> Value:
    return _best_outside(_ranked(profile), excluded, net.seller_reserve)


def top_bidder(profile: ActionProfile, among: Iterable[int], rng: Optional[random.Random] = None) -> Optional[int]:
    """Highest bidder in ``among``; ties go to the lowest id, or to a random one if ``rng`` is given."""
    best = None
    tied: list[int] = []
    for i in sorted(among):
        a = profile.actions[i]
        if a is None:
            continue
        if best is None or a.value > best:
            best = a.value
            tied = [i]
        elif a.value == best:
            tied.append(i)
    if not tied:
        return None
    return tied[0] if rng is None else rng.choice(tied)


def _check(net: SocialNetwork, profile: ActionProfile) -> None:
    if len(profile.actions) != net.n:
        raise ValueError("profile size does not match the network")
    if not (profile.feasible or is_feasible(net, profile)):
        raise ValueError("profile is not feasible; apply feasibility_transform first")


def _plain_status(net, profile, winner, on_path=()) -> tuple[Optional[BuyerStatus], ...]:
    status: list[Optional[BuyerStatus]] = [None] * net.n
    for i in net.buyers:
        if profile.actions[i] is None:
            status[i] = BuyerStatus.NON_PARTICIPANT
        elif i == winner:
            status[i] = BuyerStatus.WINNER
        elif i in on_path:
            status[i] = BuyerStatus.ON_PATH
        else:
            status[i] = BuyerStatus.NORMAL
    return tuple(status)


def _welfare(net: SocialNetwork, winner: Optional[int]) -> Value:
    return 0 if winner is None else net.valuations[winner]


def second_price_local(
    net: SocialNetwork, profile: ActionProfile, rng: Optional[random.Random] = None, analysis=None
) -> Outcome:
    _check(net, profile)
    local = net.neighbors[net.seller]
    winner = top_bidder(profile, local, rng)
    payments = [0] * net.n
    if winner is not None:
        payments[winner] = best_bid(net, profile, (j for j in local if j != winner))
    return Outcome(
        MechanismKind.SPL,
        winner,
        tuple(payments),
        sum(payments),
        _welfare(net, winner),
        _plain_status(net, profile, winner),
    )


def vcg_network(
    net: SocialNetwork,
    profile: ActionProfile,
    rng: Optional[random.Random] = None,
    analysis: Optional[DiffusionAnalysis] = None,
) -> Outcome:
    _check(net, profile)
    if analysis is None:
        analysis = analyze(net, profile)
    ranked = _ranked(profile)
    winner = _top(ranked, profile, rng)
    payments = [0] * net.n
    if winner is not None:
        total = profile.actions[winner].value
        reserve = net.seller_reserve
        for _, neg in ranked:
            i = -neg
            others_now = 0 if i == winner else total
            without = _best_outside(ranked, analysis.dependent_set[i], reserve)
            payments[i] = without - others_now
    on_path = analysis.sequence[winner][:-1] if winner is not None else ()
    return Outcome(
        MechanismKind.VCG,
        winner,
        tuple(payments),
        sum(payments),
        _welfare(net, winner),
        _plain_status(net, profile, winner, on_path),
        top_bidder=winner,
        top_sequence=analysis.sequence[winner] if winner is not None else (),
    )


def idm(
    net: SocialNetwork,
    profile: ActionProfile,
    rng: Optional[random.Random] = None,
    analysis: Optional[DiffusionAnalysis] = None,
) -> Outcome:
    _check(net, profile)
    if analysis is None:
        analysis = analyze(net, profile)
    ranked = _ranked(profile)
    m = _top(ranked, profile, rng)
    payments = [0] * net.n
    if m is None:
        return Outcome(MechanismKind.IDM, None, tuple(payments), 0, 0, _plain_status(net, profile, None))

    chain = analysis.sequence[m]
    # best bid once each chain member's dependents are removed, computed once
    without = [_best_outside(ranked, analysis.dependent_set[x], net.seller_reserve) for x in chain]
    k_win = len(chain) - 1
    for k in range(len(chain) - 1):
        if profile.actions[chain[k]].value == without[k + 1]:
            k_win = k
            break
    w = chain[k_win]
    for k in range(k_win):
        payments[chain[k]] = without[k] - without[k + 1]
    payments[w] = without[k_win]

    status = _idm_status(net, profile, analysis, w, chain)
    return Outcome(
        MechanismKind.IDM,
        w,
        tuple(payments),
        sum(payments),
        _welfare(net, w),
        status,
        top_bidder=m,
        top_sequence=chain,
    )


def _idm_status(net, profile, analysis, w, chain) -> tuple[Optional[BuyerStatus], ...]:
    k_win = chain.index(w)
    m = chain[-1]
    if w != m:
        unlucky = analysis.dependent_set[chain[k_win + 1]]
    else:
        unlucky = analysis.dependent_set[m] - {m}
    on_path = chain[:k_win]
    status: list[Optional[BuyerStatus]] = [None] * net.n
    acts = profile.actions
    for i in net.buyers:
        if acts[i] is None:
            status[i] = BuyerStatus.NON_PARTICIPANT
        elif i == w:
            status[i] = BuyerStatus.WINNER
        elif i in on_path:
            status[i] = BuyerStatus.ON_PATH
        elif i in unlucky:
            status[i] = BuyerStatus.UNLUCKY
        else:
            status[i] = BuyerStatus.NORMAL
    return tuple(status)


def classify_buyers(
    net: SocialNetwork,
    profile: ActionProfile,
    outcome: Outcome,
    analysis: Optional[DiffusionAnalysis] = None,
) -> dict[int, BuyerStatus]:
    """IDM status of every buyer: Winner, OnPath, Unlucky, Normal or NonParticipant.

    Unlucky buyers are the dependents of the winner's successor on the top
    bidder's chain (or the top bidder's own dependents if she won).
    """
    if outcome.mechanism is not MechanismKind.IDM:
        raise ValueError("buyer classification is defined for IDM outcomes")
    if outcome.winner is None:
        status = _plain_status(net, profile, None)
    else:
        if analysis is None:
            analysis = analyze(net, profile)
        status = _idm_status(net, profile, analysis, outcome.winner, outcome.top_sequence)
    return {i: status[i] for i in net.buyers}


_DISPATCH = {
    MechanismKind.SPL: second_price_local,
    MechanismKind.VCG: vcg_network,
    MechanismKind.IDM: idm,
}


def run(
    kind: MechanismKind,
    net: SocialNetwork,
    profile: ActionProfile,
    rng: Optional[random.Random] = None,
    analysis: Optional[DiffusionAnalysis] = None,
) -> Outcome:
    fn = _DISPATCH.get(kind) or _DISPATCH[MechanismKind(kind)]
    return fn(net, profile, rng=rng, analysis=analysis)


def revenue(outcome: Outcome) -> Value:
    return sum(outcome.payments)


def welfare(net: SocialNetwork, outcome: Outcome) -> Value:
    return _welfare(net, outcome.winner)


def idm_revenue_bound(net: SocialNetwork, profile: ActionProfile, outcome: Outcome, analysis: DiffusionAnalysis) -> Value:
    """Best bid outside the dependents of the first member of the winner's chain.

    IDM payments telescope, so this equals the IDM revenue.
    """
    if outcome.winner is None:
        return 0
    first = analysis.sequence[outcome.winner][0]
    return _best_excluding(net, profile, analysis.dependent_set[first])
