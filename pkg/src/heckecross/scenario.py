"""Scenario files: JSON description -> validated crossed-product setting.

Validation runs in a fixed order and stops at the first failing stage:
group, subgroup, groupoid, action, bundle, gamma_good, gamma_intersection.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .bundles import BundleAction, FellBundle, attach_bundle_action, build_bundle, check_h_good_bundle, twisted_unitaries, unitaries_from_generators
from .crossed import CrossedSystem
from .errors import AxiomError, BundleError, GroupError, GroupoidError, HxError, SchemaError
from .groupoids import GroupoidAction, action_from_generators, attach_action, build_groupoid, check_h_intersection, translation_action
from .groups import FiniteGroup, Subgroup, build_group, right_coset_action
from .scalars import Mat, parse_gauss

SCHEMA_VERSION = 1
STAGES = ("group", "subgroup", "groupoid", "action", "bundle", "gamma_good", "gamma_intersection")

_TOP = {"schema", "name", "description", "group", "gamma", "groupoid", "action", "bundle", "unitaries", "representation"}
_REPRESENTATIONS = {"point", "invariant_sections", "regular"}


@dataclass
class Scenario:
    name: str
    spec: dict
    group: FiniteGroup
    gamma: Subgroup
    action: BundleAction
    system: CrossedSystem | None = None
    representation: str | None = None
    description: str = ""
    stage_results: dict = field(default_factory=dict)

    @property
    def bundle(self) -> FellBundle:
        return self.action.bundle

    @property
    def groupoid_action(self) -> GroupoidAction:
        return self.action.groupoid_action


def _require(obj: dict, allowed: set, where: str, required: set = frozenset()):
    if not isinstance(obj, dict):
        raise SchemaError(f"{where} must be an object", witness=where)
    unknown = set(obj) - allowed
    if unknown:
        raise SchemaError(f"unknown field(s) in {where}: {sorted(unknown)}", witness=sorted(unknown))
    missing = set(required) - set(obj)
    if missing:
        raise SchemaError(f"missing field(s) in {where}: {sorted(missing)}", witness=sorted(missing))


def parse_matrix(spec: Any) -> Mat:
    """Dense ``[[..], ..]`` or sparse ``{"shape": [r, c], "entries": [[i, j, value], ..]}``."""
    if isinstance(spec, list):
        return Mat([[parse_gauss(str(c)) for c in row] for row in spec])
    if isinstance(spec, dict):
        _require(spec, {"shape", "entries"}, "matrix", {"shape", "entries"})
        r, c = spec["shape"]
        rows = [[parse_gauss("0")] * c for _ in range(r)]
        for i, j, v in spec["entries"]:
            rows[i][j] = parse_gauss(str(v))
        return Mat(rows)
    raise SchemaError("matrix must be a list of rows or a sparse object", witness=spec)


def _stage(name: str, fn, *args):
    try:
        return fn(*args)
    except SchemaError:
        raise
    except HxError as exc:
        raise AxiomError(name, str(exc), witness=exc.witness, cause=exc) from exc
    except (ValueError, KeyError, TypeError, IndexError) as exc:
        raise SchemaError(f"[{name}] malformed input: {exc}", witness=name) from exc


def _group(spec) -> FiniteGroup:
    if not isinstance(spec, dict):
        raise SchemaError("group must be an object", witness="group")
    _require(spec, {"symmetric", "cyclic", "permutations", "cayley", "labels"}, "group")
    return build_group(spec)


def _subgroup(G: FiniteGroup, spec) -> Subgroup:
    _require(spec, {"generators", "members"}, "gamma")
    if "members" in spec:
        return G.subgroup([G.element(m) for m in spec["members"]])
    return G.generate([G.element(g) for g in spec.get("generators", [])])


def _groupoid(spec, G):
    _require(spec, {"constructor", "size", "group", "src", "rng", "inv", "comp", "labels"}, "groupoid")
    return build_groupoid(spec, G)


def _action(spec, X, G) -> GroupoidAction:
    _require(spec, {"kind", "table", "maps", "subgroup"}, "action", {"kind"})
    kind = spec["kind"]
    if kind == "trivial":
        return attach_action(X, G, "trivial")
    if kind == "translation":
        if X.n != G.order * G.order:
            raise SchemaError("translation action needs the transformation groupoid of the group", witness=kind)
        return translation_action(X, G)
    if kind == "diagonal":
        # pair groupoid on n points, (i, j)g = (i^g, j^g)
        n = int(round(X.n ** 0.5))
        if n * n != X.n or G.perms is None:
            raise SchemaError("diagonal action needs a pair groupoid and a permutation group", witness=kind)

        def point(p, g):
            perm = G.perms[g]
            return perm[p] if p < len(perm) else p

        return attach_action(X, G, lambda x, g: point(x // n, g) * n + point(x % n, g))
    if kind == "right_cosets":
        K = _subgroup(G, spec["subgroup"])
        coset_action, _ = right_coset_action(G, K)
        if X.n != len(coset_action.act):
            raise SchemaError("groupoid size differs from the number of right cosets", witness=X.n)
        return attach_action(X, G, [list(row) for row in coset_action.act])
    if kind == "generators":
        maps = {G.element(k): [int(v) for v in vals] for k, vals in spec["maps"].items()}
        return action_from_generators(X, G, maps)
    if kind == "table":
        return attach_action(X, G, [[int(v) for v in row] for row in spec["table"]])
    raise SchemaError(f"unknown action kind {kind!r}", witness=kind)


def _dims(spec, X):
    _require(spec, {"dims"}, "bundle", {"dims"})
    d = spec["dims"]
    if isinstance(d, dict):
        d = {int(k): int(v) for k, v in d.items()}
    return build_bundle(X, d)


def _unitaries(spec, bundle, gaction):
    if spec is None:
        return attach_bundle_action(bundle, gaction)
    _require(spec, {"kind", "rho", "c", "V"}, "unitaries", {"kind"})
    G = gaction.group
    kind = spec["kind"]
    if kind == "identity":
        return attach_bundle_action(bundle, gaction)
    if kind == "twisted":
        _require(spec["rho"], {"even", "odd"}, "unitaries.rho", {"even", "odd"})
        if G.perms is None:
            raise SchemaError("parity twist needs a permutation group", witness=kind)
        even, odd = parse_matrix(spec["rho"]["even"]), parse_matrix(spec["rho"]["odd"])
        cs = [parse_matrix(m) for m in spec["c"]]
        units = sorted(bundle.base.units)
        pos = {u: k for k, u in enumerate(units)}
        if len(cs) != len(units):
            raise SchemaError("one matrix c(u) per unit is required", witness=len(cs))
        rho = lambda g: odd if _parity(G.perms[g]) else even
        V = twisted_unitaries(bundle, gaction, rho, lambda u: cs[pos[u]])
        return attach_bundle_action(bundle, gaction, V)
    if kind == "generators":
        gen_V = {}
        for item in spec["V"]:
            _require(item, {"g", "u", "matrix"}, "unitaries.V[]", {"g", "u", "matrix"})
            gen_V[(G.element(item["g"]), int(item["u"]))] = parse_matrix(item["matrix"])
        return attach_bundle_action(bundle, gaction, unitaries_from_generators(bundle, gaction, gen_V))
    raise SchemaError(f"unknown unitaries kind {kind!r}", witness=kind)


def _parity(perm) -> int:
    seen, odd = set(), 0
    for start in range(len(perm)):
        if start in seen:
            continue
        length, p = 0, start
        while p not in seen:
            seen.add(p)
            p = perm[p]
            length += 1
        odd ^= (length - 1) & 1
    return odd


def _check_good(action, gamma):
    res = check_h_good_bundle(action, gamma)
    if not res:
        raise AxiomError("gamma_good", f"action is not Γ-good ({res.level} level)", witness=res.witness)


def _check_intersection(action, gamma):
    res = check_h_intersection(action.groupoid_action, gamma)
    if not res:
        raise AxiomError("gamma_intersection", "Γ-intersection property fails", witness=res.witness)


def from_spec(spec: dict, name: str | None = None) -> Scenario:
    """Validate a parsed scenario and build its crossed-product system."""
    _require(spec, _TOP, "scenario", {"schema", "group", "gamma", "groupoid", "action", "bundle"})
    if spec["schema"] != SCHEMA_VERSION:
        raise SchemaError(f"unsupported schema version {spec['schema']!r}", witness=spec["schema"])
    rep = spec.get("representation")
    if rep is not None and rep not in _REPRESENTATIONS:
        raise SchemaError(f"unknown representation {rep!r}", witness=rep)
    G = _stage("group", _group, spec["group"])
    gamma = _stage("subgroup", _subgroup, G, spec["gamma"])
    X = _stage("groupoid", _groupoid, spec["groupoid"], G)
    gaction = _stage("action", _action, spec["action"], X, G)
    bundle = _stage("bundle", _dims, spec["bundle"], X)
    action = _stage("bundle", _unitaries, spec.get("unitaries"), bundle, gaction)
    _check_good(action, gamma)
    _check_intersection(action, gamma)
    system = CrossedSystem(action, gamma, check=False)
    return Scenario(
        name=name or spec.get("name", "scenario"),
        spec=spec,
        group=G,
        gamma=gamma,
        action=action,
        system=system,
        representation=rep,
        description=spec.get("description", ""),
    )


def bundled_fixtures() -> list[str]:
    root = resources.files("heckecross") / "data"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def resolve_path(path: str | Path) -> Path | Any:
    """A path on disk, or the bundled fixture with the same file name."""
    p = Path(path)
    if p.exists():
        return p
    candidate = resources.files("heckecross") / "data" / p.name
    if candidate.is_file():
        return candidate
    raise SchemaError(f"scenario file not found: {path}", witness=str(path))


def load_spec(path: str | Path) -> dict:
    src = resolve_path(path)
    try:
        return json.loads(src.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON in {path}: {exc}", witness=str(path)) from exc


def load_scenario(path: str | Path) -> Scenario:
    spec = load_spec(path)
    return from_spec(spec, name=spec.get("name", Path(str(path)).stem))


def load_fixture(name: str) -> Scenario:
    return load_scenario(f"examples/{name}.json")
