"""
Why network VCG loses money on a line
=====================================

A seller sits at one end of a path of buyers. Only the last buyer values
the item. Network VCG pays every intermediary for passing the word along,
so the seller ends up paying out more than she earns. IDM breaks even.
"""

# %%
# Build the line with five buyers: values 0, 0, 0, 0, 1
from diffauction import MechanismKind, run, truthful_profile
from diffauction.generators import line_graph
from diffauction.mechanisms import format_value

net = line_graph(5)
prof = truthful_profile(net)

# %%
# Run all three mechanisms on the truthful profile
for kind in (MechanismKind.VCG, MechanismKind.IDM, MechanismKind.SPL):
    out = run(kind, net, prof)
    pays = " ".join(format_value(p) for p in out.payments[1:])
    print(f"{kind.value:>4}: winner {out.winner}  payments [{pays}]  revenue {format_value(out.revenue)}")

# %%
# The deficit grows with the length of the line: -(l - 1)
for length in range(1, 9):
    net = line_graph(length)
    out = run(MechanismKind.VCG, net, truthful_profile(net))
    print(length, out.revenue)

# %%
# IDM gives the item to buyer 1: her bid equals the best bid once
# buyer 2's dependents are gone, so nobody downstream is paid.
net = line_graph(5)
out = run(MechanismKind.IDM, net, truthful_profile(net))
print("critical sequence of the top bidder:", out.top_sequence)
print("statuses:", [s.value for s in out.status[1:]])
