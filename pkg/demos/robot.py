"""The cleaning robot with gates that may close.

Run with `python3 demos/robot.py`.
"""
# %% [markdown]
# Three tiers: clean room D; also clean L2; also clean L2 first.  Only the
# first is enforceable up front, the others need the gates to stay open.

# %%
import json
from importlib.resources import files

from tiersynth.domain import load_domain
from tiersynth.policies import GreedyAdversarial, GreedyCooperative
from tiersynth.synthesis import AdaptiveExecutor, play, solve_tiers

fx = files("tiersynth") / "fixtures"
d = load_domain(str(fx / "robot.json"))
goals = json.loads((fx / "robot.goals.json").read_text())
syn = solve_tiers(d, goals)
print(len(d.states), "domain states;", syn.report["single_solves"], "single and",
      syn.report["pair_solves"], "pair solves")
print("initial values:", AdaptiveExecutor(syn).values())


# %% An environment that closes the gates whenever it can, and one that keeps
# them open.
def prefer(reaction):
    def policy(e, action):
        legal = sorted(e.legal_reactions(action))
        return reaction if reaction in legal else legal[0]
    return policy


for name, env in [("close", prefer("close")), ("open", prefer("open")),
                  ("greedy-adversarial", GreedyAdversarial()),
                  ("greedy-cooperative", GreedyCooperative())]:
    e = AdaptiveExecutor(syn)
    out = play(e, env)
    print(f"{name:19} highest tier {out.highest}  verdicts {out.verdicts}")

# %% Step-by-step dispatch decisions for the open-gate run.
e = AdaptiveExecutor(syn)
out = play(e, prefer("open"))
for dp in out.dispatches:
    print(f"j={dp.j} l={dp.l} m={dp.m} {dp.source:6} {dp.action}")
