"""Strategy bundle directories: a manifest plus one JSON file per objective
and per objective pair.  Output is byte-deterministic for equal inputs."""

from __future__ import annotations

import json
from pathlib import Path

from .domain import ERRORS, Domain
from .games import TIE_BREAK
from .ltlf import parse_formula, to_text
from .synthesis import MultiTierSynthesis, ObjectiveTable, PairTable

FORMAT_VERSION = 1


def _dump(path: Path, doc) -> None:
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n")


def objective_json(t: ObjectiveTable, index: int, actions, reactions) -> dict:
    moves = [(a, r) for a in actions for r in reactions]
    states = []
    for q, (s, x) in enumerate(t.tags):
        states.append({
            "id": q,
            "tag": {"domain": s if isinstance(s, str) else sorted(s), "dfa": x},
            "win": q in t.win,
            "coop": q in t.coop,
            "action": t.kappa.get(q),
            "rank": t.win_rank.get(q),
            "coop_action": t.nu.get(q),
            "coop_rank": t.coop_rank.get(q),
            "succ": [t.succ[q][m] for m in moves],
        })
    return {
        "version": FORMAT_VERSION,
        "objective_index": index,
        "formula": to_text(t.formula),
        "moves": {"actions": list(actions), "reactions": list(reactions)},
        "initial": t.initial,
        "states": states,
    }


def pair_json(p: PairTable) -> dict:
    states = []
    for k, key in enumerate(p.states):
        states.append({
            "id": k,
            "tag": {"first": key[0], "second": key[1]},
            "wp": key in p.wp,
            "action": p.omega.get(key),
            "rank": p.rank.get(key),
        })
    return {"version": FORMAT_VERSION, "pair": [p.first, p.second], "initial": 0,
            "states": states}


def write_bundle(syn: MultiTierSynthesis, out: str | Path) -> list[Path]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    d = syn.domain
    written = []
    obj_files, pair_files = [], []
    for i, t in enumerate(syn.objectives, start=1):
        name = f"objective-{i}.json"
        _dump(out / name, objective_json(t, i, d.actions, d.reactions))
        obj_files.append(name)
    for (i, j) in sorted(syn.pairs):
        name = f"pair-{i}-{j}.json"
        _dump(out / name, pair_json(syn.pairs[i, j]))
        pair_files.append(name)
    manifest = {
        "version": FORMAT_VERSION,
        "domain_sha256": d.digest(),
        "goals": [to_text(g) for g in syn.goals],
        "tie_break": TIE_BREAK,
        "objectives": obj_files,
        "pairs": pair_files,
        "single_solves": syn.report.get("single_solves", len(obj_files)),
        "pair_solves": syn.report.get("pair_solves", len(pair_files)),
    }
    _dump(out / "manifest.json", manifest)
    for name in ["manifest.json"] + obj_files + pair_files:
        written.append(out / name)
    return written


def _state(tag):
    return tag if isinstance(tag, str) and tag in ERRORS else frozenset(tag)


def load_bundle(path: str | Path, domain: Domain) -> MultiTierSynthesis:
    """Rebuild the executor tables from a bundle written for `domain`."""
    path = Path(path)
    manifest = json.loads((path / "manifest.json").read_text())
    if manifest.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported bundle version {manifest.get('version')}")
    if manifest["domain_sha256"] != domain.digest():
        raise ValueError("bundle was synthesized for a different domain")
    goals = [parse_formula(g) for g in manifest["goals"]]
    objectives = []
    for i, name in enumerate(manifest["objectives"], start=1):
        doc = json.loads((path / name).read_text())
        moves = [(a, r) for a in doc["moves"]["actions"] for r in doc["moves"]["reactions"]]
        rows = doc["states"]
        objectives.append(ObjectiveTable(
            formula=goals[i - 1],
            tags=[(_state(s["tag"]["domain"]), s["tag"]["dfa"]) for s in rows],
            succ=[dict(zip(moves, s["succ"])) for s in rows],
            win=frozenset(s["id"] for s in rows if s["win"]),
            coop=frozenset(s["id"] for s in rows if s["coop"]),
            kappa={s["id"]: s["action"] for s in rows if s["action"] is not None},
            nu={s["id"]: s["coop_action"] for s in rows if s["coop_action"] is not None},
            win_rank={s["id"]: s["rank"] for s in rows if s["rank"] is not None},
            coop_rank={s["id"]: s["coop_rank"] for s in rows if s["coop_rank"] is not None},
            initial=doc["initial"],
        ))
    pairs = {}
    for name in manifest["pairs"]:
        doc = json.loads((path / name).read_text())
        i, j = doc["pair"]
        rows = doc["states"]
        key = lambda s: (s["tag"]["first"], s["tag"]["second"])
        pairs[i, j] = PairTable(
            first=i, second=j,
            states=[key(s) for s in rows],
            wp=frozenset(key(s) for s in rows if s["wp"]),
            omega={key(s): s["action"] for s in rows if s["action"] is not None},
            rank={key(s): s["rank"] for s in rows if s["rank"] is not None},
        )
    report = {"objectives": len(goals), "single_solves": manifest["single_solves"],
              "pair_solves": manifest["pair_solves"]}
    return MultiTierSynthesis(domain, goals, objectives, pairs, report)
