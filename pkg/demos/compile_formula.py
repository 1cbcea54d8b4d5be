"""Compiling LTLf formulas into DFAs.

Run with `python3 demos/compile_formula.py`.
"""
# %% [markdown]
# A formula is parsed, compiled by progression and then checked against the
# direct trace evaluator on every short trace.

# %%
from tiersynth.automata import accepts, minimize, to_dfa, to_dot
from tiersynth.corpus import all_traces
from tiersynth.ltlf import evaluate, parse_formula, to_text

f = parse_formula("F(g & X c)")
dfa = to_dfa(f)
print(to_text(f), "->", len(dfa), "states,", len(dfa.final), "final")

# %% Each state is labelled by the residual obligation and whether the prefix
# read so far already satisfies the formula.
for q, label in enumerate(dfa.ts.labels):
    print(q, label)

# %% Agreement with the evaluator on all traces up to length 4.
traces = list(all_traces(["g", "c"], 4))
assert all(accepts(dfa, t) == evaluate(t, f) for t in traces)
print("agrees on", len(traces), "traces")

# %% Minimization and Graphviz output.
small = minimize(dfa)
print("minimal:", len(small), "states")
print(to_dot(small))
