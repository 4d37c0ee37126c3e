"""Shared builders and hypothesis strategies."""
import random

from hypothesis import strategies as st

from diffauction import SocialNetwork
from diffauction.generators import random_network, random_profile


@st.composite
def networks_and_profiles(draw, n_max: int = 9, grid=(0, 1, 2, 3)):
    """A small random network and a random feasible profile on it."""
    seed = draw(st.integers(0, 2**32 - 1))
    rng = random.Random(seed)
    net = random_network(rng, n_max, grid)
    prof = random_profile(net, rng, grid, null_prob=draw(st.sampled_from([0.0, 0.1, 0.3])))
    return net, prof


def diamond() -> SocialNetwork:
    # s=0, A=1, B=2, C=3
    return SocialNetwork.from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)], [0, 1, 2, 3])
