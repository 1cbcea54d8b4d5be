"""Command-line interface.

Exit codes: 0 success, 1 I/O or system error, 2 semantic rejection
(invalid domain, formula syntax, goals that are not tiers), 3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .automata import minimize, to_dfa, to_dot
from .bundle import load_bundle, write_bundle
from .domain import load_domain, state_text
from .errors import DomainError, ResourceError, TierError, TierSynthError
from .ltlf import formula_size, parse_formula
from .policies import make_policy
from .synthesis import AdaptiveExecutor, check_multitier, play, solve_tiers

EXIT_OK, EXIT_IO, EXIT_SEMANTIC, EXIT_RESOURCE = 0, 1, 2, 3


def _read_goals(path: str) -> list:
    goals = json.loads(Path(path).read_text())
    if not isinstance(goals, list) or not goals or not all(isinstance(g, str) for g in goals):
        raise ValueError("goals file must be a non-empty JSON array of formula strings")
    return [parse_formula(g) for g in goals]


def cmd_validate(args) -> int:
    try:
        d = load_domain(Path(args.domain))
    except DomainError as exc:
        if args.json:
            print(json.dumps(exc.report(), sort_keys=True))
        else:
            print(f"invalid domain ({exc.kind}): {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    if args.json:
        print(json.dumps({"valid": True, "states": len(d.states),
                          "actions": len(d.actions), "reactions": len(d.reactions)},
                         sort_keys=True))
    else:
        print(f"valid: {len(d.states)} reachable states, {len(d.actions)} actions, "
              f"{len(d.reactions)} reactions")
    return EXIT_OK


def cmd_compile(args) -> int:
    f = parse_formula(args.formula)
    atoms = [a for a in args.atoms.split(",") if a] if args.atoms is not None else None
    dfa = to_dfa(f, atoms)
    if args.minimize:
        dfa = minimize(dfa)
    if args.dump_dot:
        text = to_dot(dfa)
        if args.dump_dot == "-":
            sys.stdout.write(text)
        else:
            Path(args.dump_dot).write_text(text)
    if args.stats or not args.dump_dot:
        # size counts the distinct subformulas of the formula as written
        print(f"states={len(dfa)}")
        print(f"finals={len(dfa.final)}")
        print(f"size={formula_size(f)}")
    return EXIT_OK


def cmd_check_tiers(args) -> int:
    d = load_domain(Path(args.domain))
    goals = _read_goals(args.goals)
    found = check_multitier(d, goals)
    if found is None:
        print(f"ok: {len(goals)} tiers")
        return EXIT_OK
    trace, i = found
    print(json.dumps({"tier": i, "counterexample": trace.to_json()}, sort_keys=True))
    print(f"tier {i + 1} is not contained in tier {i}: {trace}", file=sys.stderr)
    return EXIT_SEMANTIC


def cmd_synthesize(args) -> int:
    d = load_domain(Path(args.domain))
    goals = _read_goals(args.goals)
    syn = solve_tiers(d, goals, jobs=args.jobs)
    write_bundle(syn, args.output)
    r = syn.report
    print(f"single solves: {r['single_solves']}")
    print(f"pair solves: {r['pair_solves']}")
    print(f"bundle: {args.output}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    d = load_domain(Path(args.domain))
    if args.bundle:
        syn = load_bundle(args.bundle, d)
    elif args.goals:
        syn = solve_tiers(d, _read_goals(args.goals))
    else:
        raise ValueError("simulate needs --goals or --bundle")
    e = AdaptiveExecutor(syn)
    policy = make_policy(args.env, seed=args.seed)

    def on_step(dispatch, reaction):
        if args.json:
            return
        line = f"{state_text(e.state)}: {dispatch.action} / {reaction}"
        if args.explain:
            line += (f"   [j={dispatch.j} l={dispatch.l} m={dispatch.m} "
                     f"via {dispatch.source}; values={','.join(dispatch.values)}]")
        print(line)

    result = play(e, policy, max_steps=args.max_steps, on_step=on_step)
    if args.json:
        print(json.dumps(result.to_json(), sort_keys=True))
        return EXIT_OK
    final = e.log[-1] if e.log else None
    if final is not None and final.action is None:
        note = f"stop at {state_text(e.state)}"
        if args.explain:
            note += f"   [j={final.j} l={final.l} m={final.m} via {final.source}]"
        print(note)
    if result.truncated:
        print(f"truncated after {args.max_steps} steps")
    for i, (g, ok) in enumerate(zip(syn.goals, result.verdicts), start=1):
        print(f"tier {i}: {'satisfied' if ok else 'not satisfied'}  ({g})")
    if result.highest:
        print(f"tier {result.highest} satisfied")
    else:
        print("no tier satisfied")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tiersynth",
                                description="Adaptive strategies for multi-tier LTLf goals.")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="check a domain file")
    v.add_argument("domain")
    v.add_argument("--json", action="store_true", help="machine-readable report")
    v.set_defaults(func=cmd_validate)

    c = sub.add_parser("compile", help="compile a formula to a DFA")
    c.add_argument("formula")
    c.add_argument("--atoms", help="comma-separated alphabet atoms (default: the formula's)")
    c.add_argument("--dump-dot", metavar="FILE", help="write Graphviz source ('-' for stdout)")
    c.add_argument("--minimize", action="store_true")
    c.add_argument("--stats", action="store_true")
    c.set_defaults(func=cmd_compile)

    t = sub.add_parser("check-tiers", help="check that goals form a tier hierarchy")
    t.add_argument("domain")
    t.add_argument("goals")
    t.set_defaults(func=cmd_check_tiers)

    s = sub.add_parser("synthesize", help="synthesize a strategy bundle")
    s.add_argument("domain")
    s.add_argument("goals")
    s.add_argument("-o", "--output", required=True, help="bundle directory")
    s.add_argument("--jobs", type=int, default=1)
    s.set_defaults(func=cmd_synthesize)

    m = sub.add_parser("simulate", help="run the adaptive strategy against an environment")
    m.add_argument("domain")
    m.add_argument("--goals")
    m.add_argument("--bundle")
    m.add_argument("--env", default="greedy-adversarial",
                   help="scripted:r1,r2 | random[:seed] | greedy-adversarial | "
                        "greedy-cooperative | interactive")
    m.add_argument("--max-steps", type=int, default=100)
    m.add_argument("--explain", action="store_true", help="show j, l, m at every step")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--json", action="store_true")
    m.set_defaults(func=cmd_simulate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ResourceError as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except DomainError as exc:
        print(f"invalid domain ({exc.kind}): {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    except TierError as exc:
        trace, i = exc.counterexample
        print(json.dumps({"tier": i, "counterexample": trace.to_json()}, sort_keys=True))
        print(f"goals are not tiers: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (TierSynthError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SEMANTIC


if __name__ == "__main__":
    sys.exit(main())
