"""
The twelve-buyer worked example
===============================

A reconstruction of the running example: the seller informs A, B and C,
buyer L has the top bid 15, and her critical sequence is C, I, L. IDM
stops at I, charges her 11 and pays C a reward of 1.
"""

# %%
from diffauction import analyze, build_diffusion_graph, idm, load_scenario, to_dot, truthful_profile
from diffauction.mechanisms import format_value

net, _ = load_scenario("fig2")
prof = truthful_profile(net)
lab = net.label
print("edges:", ", ".join(f"{lab(a)}-{lab(b)}" for a, b in net.edges()))
print("values:", {lab(i): net.valuations[i] for i in net.buyers})

# %%
# Critical sequences and dependent sets come from the dominator tree
an = analyze(net, prof)
for x in "DGL":
    i = net.index_of(x)
    seq = [lab(j) for j in an.sequence[i]]
    dep = sorted(lab(j) for j in an.dependent_set[i])
    print(f"C_{x} = {seq}   d_{x} = {dep}")

# %%
# G reports D as a neighbor she forwards to, but every path to G runs
# through D, so that edge can never carry news.
g = build_diffusion_graph(net, prof)
D, G = net.index_of("D"), net.index_of("G")
print("raw edge G->D:", D in g.out_edges[G])
print("information flow G->D:", (G, D) in g.information_flow_edges(an))

# %%
# Walk the allocation scan along C_L
out = idm(net, prof, analysis=an)
for i in net.buyers:
    if out.payments[i] or out.status[i].value != "Normal":
        print(f"{lab(i)}: {out.status[i].value:<8} payment {format_value(out.payments[i])}")
print("revenue", format_value(out.revenue), "welfare", format_value(out.welfare))

# %%
# Graphviz source for a picture (render with `dot -Tpng`)
print(to_dot(g, an, labels=net.labels))
