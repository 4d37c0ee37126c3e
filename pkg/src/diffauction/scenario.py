"""JSON scenario files.

Layout (schema_version 1)::

    {
      "schema_version": 1,
      "seller": 0,
      "agents": [{"id": 0, "label": "s", "neighbors": [1, 2], "valuation": "0"}, ...],
      "declared_profile": [{"id": 1, "bid": "3.5", "diffusion_set": [0, 2]},
                           {"id": 2, "bid": null, "diffusion_set": []}]
    }

Valuations and bids are decimal strings (or ``"p/q"``) so they stay exact.
The seller's ``valuation`` is her reserve price.
``label`` and ``declared_profile`` are optional; buyers missing from a
declared profile take the null action.
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Optional, Union

from .mechanisms import format_value
from .model import ActionProfile, Bid, SocialNetwork, as_value, make_profile

SCHEMA_VERSION = 1


class ScenarioError(ValueError):
    """Malformed scenario file."""


def network_to_dict(net: SocialNetwork, profile: Optional[ActionProfile] = None) -> dict:
    agents = []
    for i in range(net.n):
        entry = {"id": i}
        if net.labels is not None:
            entry["label"] = net.labels[i]
        entry["neighbors"] = sorted(net.neighbors[i])
        entry["valuation"] = format_value(net.seller_reserve if i == net.seller else net.valuations[i])
        agents.append(entry)
    doc = {"schema_version": SCHEMA_VERSION, "seller": net.seller, "agents": agents}
    if profile is not None:
        doc["declared_profile"] = [
            {
                "id": i,
                "bid": None if profile[i] is None else format_value(profile[i].value),
                "diffusion_set": [] if profile[i] is None else sorted(profile[i].diffusion),
            }
            for i in net.buyers
        ]
    return doc


def network_from_dict(doc: dict, precision: Optional[int] = None) -> tuple[SocialNetwork, Optional[ActionProfile]]:
    try:
        version = doc.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ScenarioError(f"unsupported schema_version {version}")
        agents = sorted(doc["agents"], key=lambda a: a["id"])
        n = len(agents)
        if [a["id"] for a in agents] != list(range(n)):
            raise ScenarioError("agent ids must be 0..n-1")
        seller = doc["seller"]
        if isinstance(seller, str) and not seller.isdigit():
            seller = [a.get("label") for a in agents].index(seller)
        seller = int(seller)
        labels = None
        if any("label" in a for a in agents):
            labels = tuple(str(a.get("label", a["id"])) for a in agents)
        vals = [as_value(a.get("valuation", 0), precision) for a in agents]
        reserve = vals[seller]
        vals[seller] = 0
        net = SocialNetwork(
            neighbors=tuple(frozenset(int(j) for j in a["neighbors"]) for a in agents),
            valuations=tuple(vals),
            seller=seller,
            seller_reserve=reserve,
            labels=labels,
        )
        profile = None
        if doc.get("declared_profile") is not None:
            acts: dict[int, Optional[Bid]] = {}
            for entry in doc["declared_profile"]:
                i = int(entry["id"])
                if i == seller or not 0 <= i < n:
                    raise ScenarioError(f"declared action for invalid buyer {i}")
                bid = entry.get("bid")
                acts[i] = None if bid is None else Bid(as_value(bid, precision), frozenset(entry.get("diffusion_set", ())))
            profile = make_profile(net, acts)
    except ScenarioError:
        raise
    except (KeyError, TypeError, ValueError, ArithmeticError) as exc:
        raise ScenarioError(f"bad scenario: {exc}") from exc
    return net, profile


def load_scenario(source: Union[str, Path], precision: Optional[int] = None) -> tuple[SocialNetwork, Optional[ActionProfile]]:
    """Load from a path, or a bundled scenario name such as ``"line5"`` or ``"fig2"``."""
    path = Path(source)
    if not path.exists():
        bundled = resources.files("diffauction") / "scenarios" / f"{source}.json"
        if not bundled.is_file():
            raise ScenarioError(f"no such scenario: {source}")
        text = bundled.read_text()
    else:
        text = path.read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON in {source}: {exc}") from exc
    return network_from_dict(doc, precision)


def dumps_scenario(net: SocialNetwork, profile: Optional[ActionProfile] = None) -> str:
    return json.dumps(network_to_dict(net, profile), indent=2) + "\n"


def save_scenario(path: Union[str, Path], net: SocialNetwork, profile: Optional[ActionProfile] = None) -> None:
    Path(path).write_text(dumps_scenario(net, profile))


def bundled_scenarios() -> list[str]:
    root = resources.files("diffauction") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))
