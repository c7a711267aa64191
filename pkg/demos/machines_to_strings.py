# %% [markdown]
# Machines to strings: a layered graph becomes four p-sequences, and a small
# sequential automaton becomes 4k strings whose common subsequences of
# length t*k mirror its runs.

# %%
from paraspace.core import Graph
from paraspace.machine_reductions import layeredreach_to_lcs_injective, seqca_to_lcs
from paraspace.generators import gen_instance
from paraspace.oracles import graph_property, lcs_decide, lcs_injective_decide, run_sequential

g = Graph.from_edges(5, [(0, 1), (0, 2), (1, 3), (2, 3), (3, 4)], layers=(0, 1, 1, 2, 3), s=0, t=4)
out = layeredreach_to_lcs_injective(g)
for s in out.strings:
    print("".join(s))
print("reachable:", graph_property("layered-reach", g), "| common subsequence of length", out.l, ":", lcs_injective_decide(out))

# %%
inst = gen_instance("seqca", {"states": 2, "cells": 2, "horizon": 2}, 4)
lcs = seqca_to_lcs(inst)
print(len(lcs.strings), "strings, target length", lcs.l)
print("automaton:", run_sequential(inst), "| strings:", lcs_decide(lcs))

# %%
from paraspace.harness import get_reduction, make_cases, summarize, summary_table, verify_reduction

rows = []
for name in ("tm_to_ca", "dagca_to_tpg", "seqca_to_lcs"):
    d = get_reduction(name)
    rows.append(summarize(name, verify_reduction(d, make_cases(d, 30, 0))))
print(summary_table(rows))
