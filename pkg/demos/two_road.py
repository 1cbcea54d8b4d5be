"""The two-road domain: enforce one goal, try for a better one.

Run with `python3 demos/two_road.py`.
"""
# %% [markdown]
# The safe road always reaches the goal.  The risky one may also pick up a
# coin, or may end in a dead end.  Tier 1 is "reach g", tier 2 is "reach g
# with the coin".

# %%
from importlib.resources import files

from tiersynth.domain import load_domain
from tiersynth.policies import Scripted
from tiersynth.synthesis import AdaptiveExecutor, play, solve_tiers, synth_single, synth_winpend

d = load_domain(str(files("tiersynth") / "fixtures" / "two-road.json"))
goals = ["F g", "F g & F c"]
print("states:", [sorted(s) for s in d.states])

# %% Single objectives: the first is winning, the second only pending.
for f in goals:
    s = synth_single(d, f)
    q0 = s.arena.ts.initial
    value = "win" if q0 in s.win.region else "pend" if q0 in s.coop.region else "lose"
    print(f"{f:12} {value:5} kappa={s.kappa.get(q0)} nu={s.nu.get(q0)}")

# %% The win-pend region of the pair: states from which tier 1 can be
# enforced while tier 2 stays reachable.
pr = synth_winpend(d, *goals)
for q in sorted(pr.wp.region, key=pr.wp.rank.get):
    print("WP", pr.arena.tag(q), "rank", pr.wp.rank[q], "omega", pr.omega.get(q))

# %% The adaptive executor against two scripted environments.
syn = solve_tiers(d, goals)
for script in (["r", "r1"], ["r", "r2"]):
    e = AdaptiveExecutor(syn)
    print(e.explain().as_dict())
    out = play(e, Scripted(script))
    print(script, str(out.trace), "->", out.verdicts)
