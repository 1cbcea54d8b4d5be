"""Cross-checking the game solvers against brute force.

Run with `python3 demos/oracle_crosscheck.py`.
"""
# %% [markdown]
# The oracle searches positional strategies directly on (domain state, DFA
# state) pairs.  On small random domains its regions must coincide with the
# fixpoint solvers, and history values with region membership.

# %%
import random

from tiersynth.corpus import corpus, random_tiers
from tiersynth.domain import legal_histories
from tiersynth.oracle import oracle_regions, oracle_value, oracle_winpend
from tiersynth.synthesis import pair_from_singles, synth_single

rng = random.Random(1)
rows = []
for d in corpus(seed=3, size=8):
    tiers = random_tiers(rng, d.fluents, 2)
    s1, s2 = (synth_single(d, f) for f in tiers)
    w, c = oracle_regions(d, tiers[0], state_cap=200)
    regions_ok = w == set(s1.win.region) and c == set(s1.coop.region)
    pr = pair_from_singles(s1, s2, 1, 2)
    wp_ok = oracle_winpend(d, *tiers, state_cap=200) == {q: pr.wp.rank[q] for q in pr.wp.region}
    values_ok = True
    for h in legal_histories(d, 3):
        q = s1.arena.locate(h)
        want = "win" if q in s1.win.region else "pend" if q in s1.coop.region else "lose"
        values_ok &= oracle_value(d, tiers[0], h, state_cap=200) == want
    rows.append((len(d.states), len(s1.arena), regions_ok, wp_ok, values_ok))

# %%
print("domain arena regions wp values")
for r in rows:
    print("%6d %5d %7s %5s %6s" % r)
assert all(all(r[2:]) for r in rows)
