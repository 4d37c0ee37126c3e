"""
Checking incentive compatibility by brute force
===============================================

On small networks the finite action space can be enumerated completely:
every connected graph, every valuation from a grid, every buyer, every
bid from a grid that crosses each allocation boundary and every subset of
neighbors to tell (or staying out). Any profitable deviation would show up.
"""

# %%
import time

from diffauction import MechanismKind
from diffauction.verifier import exhaustive_sweep, others_sweep

t0 = time.perf_counter()
res = exhaustive_sweep(n_max=4, grid=(0, 1, 2, 3), processes=1)
print(f"{res.scenarios} scenarios on {res.topologies} labeled graphs in {time.perf_counter() - t0:.1f} s")
for rep in res.reports.values():
    print(rep.summary_line())

# %%
# The sweep above keeps the other buyers truthful. Dominant-strategy IC
# asks for more: the deviating buyer must not gain whatever the others do.
res = others_sweep(n_max=3, grid=(0, 1, 2))
for rep in res.reports.values():
    print(rep.summary_line())

# %%
# The local second-price baseline is IC too, but only because it ignores
# diffusion altogether. In the twelve-buyer example, buyer C earns a reward
# under IDM for telling I, and nothing under SPL whatever she does.
from diffauction import Bid, load_scenario, run, truthful_profile, utility
from diffauction.model import feasibility_transform

net, _ = load_scenario("fig2")
C = net.index_of("C")
truthful = truthful_profile(net)
hidden = feasibility_transform(net, truthful.replace(C, Bid(net.valuations[C], frozenset())))
for kind in (MechanismKind.SPL, MechanismKind.IDM):
    print(kind.value, "tell:", utility(net, C, run(kind, net, truthful)),
          "hide:", utility(net, C, run(kind, net, hidden)))
