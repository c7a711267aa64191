# %% [markdown]
# Union problems: from one instantiation per family down to a single
# weight-k instantiation, with the oracle answer checked at every hop.

# %%
from paraspace.core import BooleanFormula, FamilyUnionInstance, TemplateWord, conj, decode_bf, encode_bf, imp, var
from paraspace.oracles import solve_union
from paraspace.union_reductions import family_to_subset_bf, subset_to_weighted_bf

phi = BooleanFormula(conj(var(0), imp(var(1), var(0)), var(2)), ("x", "y", "z"))
template = TemplateWord(encode_bf(phi))
word = lambda bits: template.fill([int(b) for b in bits])
family = FamilyUnionInstance(template, ((word("100"), word("001")), (word("001"), word("110"))), "bf")
print("family answer:", solve_union("family", family))

# %%
subset = family_to_subset_bf(family)
f, _ = decode_bf(subset.template.symbols)
print("tagged formula:", f.pretty())
for w in subset.S:
    print("  ", "".join(map(str, w.bits)))
print("subset answer:", solve_union("subset", subset), "k =", subset.k)

# %%
weighted = subset_to_weighted_bf(subset)
f, _ = decode_bf(weighted.template.symbols)
print("selector formula:", f.pretty())
print("weighted answer:", solve_union("weighted", weighted), "k =", weighted.k)
