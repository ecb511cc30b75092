"""Persistent project state and the operations the CLI and service share.

A project directory holds everything: the catalog in ``project.json``,
descriptor XML under ``hypotheses/``, certain relations and U-relations
as CSV, and the world table with its pre-conditioning archives. Every
operation loads fresh state, mutates it, and saves on success, so a
crash can lose at most the operation in flight. Writers serialize
through an advisory file lock; readers go lock-free.

The lifecycle of one (phenomenon, hypothesis) pair only moves forward:
deployed, loaded, u-introduced, conditioned. Conditioning may repeat.
Once the first uncertainty introduction has built the hypothesis-choice
variables, the catalog is frozen; a later phenomenon or hypothesis
would invalidate the world space those variables span.
"""

from __future__ import annotations

import fcntl
import json
import os

from . import uncertain
from .causal import PHI, UPSILON, encode_fds, total_causal_mapping
from .conditioning import (
    ObservationSet,
    World,
    collapsed_worlds,
    compute_report,
    condition_worlds,
    default_sigma,
    joint_variable,
    rewrite_relation,
)
from .errors import (
    BadInput,
    EmptyObservationSet,
    InvalidStructure,
    NotUIntroduced,
    NoTrials,
    ProjectExists,
    ProjectNotFound,
    StageViolation,
    UnknownHypothesis,
    UnknownRelation,
    UnknownSymbol,
)
from .ingest import (
    ROLE_INDEX,
    ROLE_OUTPUT,
    parse_descriptor,
    parse_phenomenon,
    validate_structure,
)
from .relstore import (
    H0_NAME,
    TID,
    Catalog,
    DeployedRelation,
    HypothesisEntry,
    RelationStore,
    TrialDataset,
    h0_relation,
    load_trial,
    parse_trial_csv,
)
from .synthesis import fold_fds, synthesize_4c
from .uncertain import (
    RandomVar,
    URelation,
    WorldTable,
    repair_key,
    u_factorize,
    u_propagate,
    var_sort_key,
    world_prob,
)

PROJECT_FILE = "project.json"
LOCK_FILE = ".lock"

STAGE_DEPLOYED = "deployed"
STAGE_LOADED = "loaded"
STAGE_UINTRO = "u-introduced"
STAGE_CONDITIONED = "conditioned"

Y0_NAME = "Y_0"


class project_lock:
    """Advisory exclusive lock over a project directory's writers."""

    def __init__(self, root):
        self.path = os.path.join(root, LOCK_FILE)
        self.stream = None

    def __enter__(self):
        self.stream = open(self.path, "a+")
        fcntl.flock(self.stream.fileno(), fcntl.LOCK_EX)
        return self

    def __exit__(self, *exc):
        fcntl.flock(self.stream.fileno(), fcntl.LOCK_UN)
        self.stream.close()
        self.stream = None
        return False


def _condition_key(pairs):
    return tuple(sorted(pairs, key=lambda p: var_sort_key(p[0])))


class Project:
    def __init__(self, root):
        self.root = root
        self.catalog = Catalog()
        self.store = RelationStore()
        self.urelations = {}  # name -> URelation, insertion order
        self.urel_meta = {}  # name -> {"phi", "upsilon", "kind", "index"}
        self.world = WorldTable()
        self.variables = {}  # var id -> RandomVar
        self.worlds = {}  # phi -> [World], sorted by (upsilon, tid)
        self.joint = {}  # phi -> joint var id
        self.stages = {}  # (phi, upsilon) -> stage
        self.var_counter = 0
        self.ordinals = {}  # upsilon -> next U-relation ordinal
        self._descriptors = {}  # hypothesis id -> raw XML bytes
        self._pending_archive = None  # superseded world table CSV, if any

    # ----- creation and persistence

    @classmethod
    def init(cls, root) -> "Project":
        if os.path.exists(os.path.join(root, PROJECT_FILE)):
            raise ProjectExists(root)
        for sub in ("", "hypotheses", "relations", "urelations",
                    "world", os.path.join("world", "archive")):
            os.makedirs(os.path.join(root, sub), exist_ok=True)
        project = cls(root)
        project.store.add(h0_relation())
        project.save()
        return project

    @classmethod
    def open(cls, root) -> "Project":
        path = os.path.join(root, PROJECT_FILE)
        if not os.path.exists(path):
            raise ProjectNotFound(f"{root} holds no project")
        with open(path, encoding="utf-8") as stream:
            state = json.load(stream)

        project = cls(root)
        for item in state["phenomena"]:
            project.catalog.add_phenomenon(
                parse_phenomenon(json.dumps(item).encode())
            )
        for item in state["hypotheses"]:
            xml_path = os.path.join(root, "hypotheses", f"{item['id']}.xml")
            with open(xml_path, "rb") as stream:
                data = stream.read()
            project._descriptors[item["id"]] = data
            structure = parse_descriptor(data)
            mapping = total_causal_mapping(structure)
            primitive = encode_fds(structure, mapping)
            schema = synthesize_4c(fold_fds(primitive), structure.hypothesis_id,
                                   primitive)
            schema.warnings = mapping.warnings + schema.warnings
            entry = HypothesisEntry(structure.hypothesis_id, item["name"],
                                    structure, schema)
            project.catalog.add_hypothesis(entry)
            for rel in schema.relations:
                project.store.add(
                    DeployedRelation.from_csv(
                        rel.name,
                        project._read("relations", f"{rel.name}.csv"),
                        [frozenset(key | {TID}) for key in rel.keys],
                        rel.origin,
                    )
                )
        project.store.add(
            DeployedRelation.from_csv(
                H0_NAME, project._read("relations", f"{H0_NAME}.csv"),
                [frozenset({PHI, UPSILON})],
            )
        )
        for phi, upsilon in state["h0"]:
            project.catalog.add_target(phi, upsilon)

        project.urel_meta = {
            name: dict(meta) for name, meta in state["urelations"].items()
        }
        for name in project.urel_meta:
            project.urelations[name] = URelation.from_csv(
                name, project._read("urelations", f"{name}.csv")
            )
        project.world = WorldTable.from_csv(project._read("world", "W.csv"))
        project.variables = {
            obj["id"]: RandomVar.from_obj(obj) for obj in state["variables"]
        }
        project.worlds = {
            int(phi): [World.from_obj(w) for w in worlds]
            for phi, worlds in state["worlds"].items()
        }
        project.joint = {int(phi): vid for phi, vid in state["joint"].items()}
        project.stages = {
            (phi, upsilon): stage for phi, upsilon, stage in state["stages"]
        }
        project.var_counter = state["varCounter"]
        project.ordinals = {int(u): n for u, n in state["ordinals"].items()}
        return project

    def _read(self, *parts) -> str:
        with open(os.path.join(self.root, *parts), encoding="utf-8") as stream:
            return stream.read()

    def _write(self, text, *parts):
        path = os.path.join(self.root, *parts)
        with open(path + ".tmp", "w", encoding="utf-8") as stream:
            stream.write(text)
        os.replace(path + ".tmp", path)

    def save(self):
        """Persist everything; a superseded world table is archived first."""
        if self._pending_archive is not None:
            archive_dir = os.path.join(self.root, "world", "archive")
            count = len(os.listdir(archive_dir))
            self._write(self._pending_archive, "world", "archive",
                        f"W.{count + 1}.csv")
            self._pending_archive = None

        state = {
            "phenomena": [
                {"id": p.phenomenon_id, "description": p.description}
                for p in self.catalog.phenomena
            ],
            "hypotheses": [
                {"id": h.hypothesis_id, "name": h.name}
                for h in self.catalog.hypotheses
            ],
            "h0": [[phi, upsilon] for phi, upsilon in self.catalog.h0],
            "urelations": self.urel_meta,
            "variables": [
                self.variables[vid].to_obj()
                for vid in sorted(self.variables, key=var_sort_key)
            ],
            "worlds": {
                str(phi): [w.to_obj() for w in worlds]
                for phi, worlds in self.worlds.items()
            },
            "joint": {str(phi): vid for phi, vid in self.joint.items()},
            "stages": [
                [phi, upsilon, stage]
                for (phi, upsilon), stage in sorted(self.stages.items())
            ],
            "varCounter": self.var_counter,
            "ordinals": {str(u): n for u, n in self.ordinals.items()},
        }
        self._write(json.dumps(state, indent=2, sort_keys=True) + "\n", PROJECT_FILE)
        for hypothesis_id, data in self._descriptors.items():
            path = os.path.join(self.root, "hypotheses", f"{hypothesis_id}.xml")
            with open(path, "wb") as stream:
                stream.write(data)
        for name, relation in self.store.relations.items():
            self._write(relation.to_csv(), "relations", f"{name}.csv")
        for name, urelation in self.urelations.items():
            self._write(urelation.to_csv(), "urelations", f"{name}.csv")
        self._write(self.world.to_csv(), "world", "W.csv")

    # ----- catalog operations

    def _check_unfrozen(self):
        if Y0_NAME in self.urelations:
            raise StageViolation(
                "the catalog is frozen: uncertainty introduction has begun"
            )

    def add_phenomenon(self, data) -> dict:
        self._check_unfrozen()
        decl = parse_phenomenon(data)
        self.catalog.add_phenomenon(decl)
        return {"id": decl.phenomenon_id, "description": decl.description}

    def add_hypothesis(self, data, target_phis) -> dict:
        self._check_unfrozen()
        for phi in target_phis:
            self.catalog.phenomenon(phi)
        structure = parse_descriptor(data)
        report = validate_structure(structure)
        if not report.valid:
            raise InvalidStructure("; ".join(report.reasons))
        mapping = total_causal_mapping(structure)
        primitive = encode_fds(structure, mapping)
        folded = fold_fds(primitive)
        schema = synthesize_4c(folded, structure.hypothesis_id, primitive)
        schema.warnings = mapping.warnings + schema.warnings

        entry = HypothesisEntry(
            structure.hypothesis_id, structure.name or f"h{structure.hypothesis_id}",
            structure, schema,
        )
        self.catalog.add_hypothesis(entry)
        try:
            self.store.deploy_schema(schema)
        except Exception:
            self.catalog.hypotheses.remove(entry)
            raise
        self._descriptors[entry.hypothesis_id] = bytes(data)
        for phi in target_phis:
            self.catalog.add_target(phi, entry.hypothesis_id)
            self.stages[(phi, entry.hypothesis_id)] = STAGE_DEPLOYED
            self.store.get(H0_NAME).insert({PHI: phi, UPSILON: entry.hypothesis_id})
        return self.hypothesis_obj(entry.hypothesis_id)

    def hypothesis_obj(self, hypothesis_id) -> dict:
        entry = self.catalog.hypothesis(hypothesis_id)
        obj = entry.schema.to_obj()
        obj["id"] = entry.hypothesis_id
        obj["name"] = entry.name
        obj["targets"] = [p for p, u in self.catalog.h0 if u == hypothesis_id]
        return obj

    # ----- trials

    def load_trial_csv(self, phi, upsilon, text) -> dict:
        self.catalog.phenomenon(phi)
        entry = self.catalog.hypothesis(upsilon)
        if (phi, upsilon) not in self.catalog.h0:
            raise UnknownHypothesis(
                f"hypothesis {upsilon} does not target phenomenon {phi}"
            )
        stage = self.stages[(phi, upsilon)]
        if stage not in (STAGE_DEPLOYED, STAGE_LOADED):
            raise StageViolation(
                f"cannot load trials for ({phi}, {upsilon}) at stage {stage}"
            )
        parameters, series, index_symbol, _ = parse_trial_csv(text)
        dataset = TrialDataset(upsilon, phi, parameters, series, index_symbol)
        tid = load_trial(self.store, entry, dataset)
        self.stages[(phi, upsilon)] = STAGE_LOADED
        return {"phi": phi, "upsilon": upsilon, "tid": tid}

    # ----- uncertainty introduction

    def _allocate_var(self) -> str:
        var_id = f"x{self.var_counter}"
        self.var_counter += 1
        return var_id

    def _register(self, variables, marginals):
        for var, probs in zip(variables, marginals):
            self.variables[var.var_id] = var
            self.world.set_marginals(var.var_id, probs)

    def _theoretical_var(self, phi) -> RandomVar:
        for var in self.variables.values():
            if var.kind == uncertain.THEORETICAL and var.phenomenon == phi:
                return var
        raise NotUIntroduced(f"phenomenon {phi} has no hypothesis-choice variable")

    def u_intro(self, phi) -> dict:
        self.catalog.phenomenon(phi)
        targets = self.catalog.targets_of(phi)
        if not targets:
            raise NoTrials(f"no hypotheses target phenomenon {phi}")
        if any(self.stages[(phi, u)] == STAGE_CONDITIONED for u in targets):
            raise StageViolation(
                f"phenomenon {phi} is already conditioned; its worlds are fixed"
            )
        loaded = [u for u in targets if self.stages[(phi, u)] == STAGE_LOADED]
        if not loaded:
            if any(self.stages[(phi, u)] == STAGE_UINTRO for u in targets):
                raise StageViolation(
                    f"uncertainty is already introduced for phenomenon {phi}"
                )
            raise NoTrials(f"no trials loaded for phenomenon {phi}")

        result = {"phenomenon": phi, "introduced": [], "skipped": [],
                  "warnings": []}

        if Y0_NAME not in self.urelations:
            urelation, variables, marginals = repair_key(
                Y0_NAME, self.store.get(H0_NAME), {PHI}, self._allocate_var
            )
            self._register(variables, marginals)
            self.urelations[Y0_NAME] = urelation
            self.urel_meta[Y0_NAME] = {"kind": "choice"}
            result["theoretical"] = [
                {"var": v.var_id, "phenomenon": v.phenomenon,
                 "alternatives": len(v.alternatives)}
                for v in variables
            ]

        theoretical = self._theoretical_var(phi)
        choice = {
            upsilon: index
            for index, (_, upsilon) in enumerate(theoretical.alternatives, start=1)
        }

        for upsilon in sorted(loaded):
            entry = self.catalog.hypothesis(upsilon)
            parameter_relation = self.store.get(entry.parameter_relation())
            rows = parameter_relation.select({PHI: phi})
            attrs = [a for a in parameter_relation.attributes
                     if a not in (TID, PHI)]
            ordinal = self.ordinals.get(upsilon, 1)
            names = [f"Y_{upsilon}^{ordinal + j}" for j in range(len(attrs))]

            clusters, variables, marginals, urelations, assignments = u_factorize(
                rows, attrs, phi, upsilon, self._allocate_var,
                lambda j: names[j - 1],
            )
            self._register(variables, marginals)
            ordinal += len(attrs)

            combinations = 1
            for var in variables:
                combinations *= len(var.alternatives)
            if len(rows) < combinations:
                result["warnings"].append(
                    f"SparseTrials: ({phi}, {upsilon}) covers {len(rows)} of "
                    f"{combinations} factor combinations; prior mass rests on "
                    "prediction-less worlds"
                )

            index_symbol = entry.structure.variables_with_role(ROLE_INDEX)[0]
            for urelation in urelations:
                self.urelations[urelation.name] = urelation
                self.urel_meta[urelation.name] = {
                    "phi": phi, "upsilon": upsilon, "kind": "parameter",
                }
            output_names = []
            for relation_name in entry.output_relations():
                relation = self.store.get(relation_name)
                propagated = u_propagate(
                    relation.select({PHI: phi}),
                    relation.attributes,
                    (theoretical.var_id, choice[upsilon]),
                    assignments,
                    f"Y_{upsilon}^{ordinal}",
                )
                ordinal += 1
                self.urelations[propagated.name] = propagated
                self.urel_meta[propagated.name] = {
                    "phi": phi, "upsilon": upsilon, "kind": "output",
                    "index": index_symbol,
                    "values": [a for a in propagated.columns
                               if a not in (PHI, UPSILON, index_symbol)],
                }
                output_names.append(propagated.name)
            self.ordinals[upsilon] = ordinal

            worlds = self.worlds.setdefault(phi, [])
            for tid in sorted(assignments):
                pairs = [(theoretical.var_id, choice[upsilon])]
                pairs += assignments[tid].items()
                worlds.append(World(phi, upsilon, tid, _condition_key(pairs)))
            worlds.sort(key=lambda w: (w.upsilon, w.tid))

            self.stages[(phi, upsilon)] = STAGE_UINTRO
            result["introduced"].append({
                "upsilon": upsilon,
                "clusters": [list(c) for c in clusters],
                "variables": [v.var_id for v in variables],
                "urelations": [u.name for u in urelations] + output_names,
            })

        for upsilon in sorted(targets):
            if self.stages[(phi, upsilon)] == STAGE_DEPLOYED:
                result["skipped"].append(upsilon)
                result["warnings"].append(
                    f"NoTrialsYet: hypothesis {upsilon} skipped, no trials "
                    f"for phenomenon {phi}"
                )
        result["worlds"] = len(self.worlds.get(phi, []))
        return result

    # ----- predictions and conditioning

    def _require_worlds(self, phi) -> list:
        self.catalog.phenomenon(phi)
        worlds = self.worlds.get(phi, [])
        if not worlds:
            raise NotUIntroduced(
                f"phenomenon {phi} has no uncertainty introduced yet"
            )
        return worlds

    def _output_urelations(self, phi, upsilon) -> list:
        return [
            name
            for name, meta in self.urel_meta.items()
            if meta.get("kind") == "output"
            and meta.get("phi") == phi and meta.get("upsilon") == upsilon
        ]

    def _series(self, phi, world: World, value_symbol=None) -> dict:
        """One world's predicted series, {index value: predicted value}."""
        for name in self._output_urelations(phi, world.upsilon):
            meta = self.urel_meta[name]
            values = meta["values"]
            symbol = value_symbol
            if symbol is None and len(values) == 1:
                symbol = values[0]
            if symbol not in values:
                continue
            urelation = self.urelations[name]
            index_at = urelation.columns.index(meta["index"])
            value_at = urelation.columns.index(symbol)
            return {
                item.data[index_at]: item.data[value_at]
                for item in urelation.tuples
                if item.condition == world.condition
            }
        raise UnknownSymbol(
            f"no output relation of hypothesis {world.upsilon} carries "
            f"{value_symbol!r}"
        )

    def _default_value_symbol(self, phi, worlds) -> str:
        shared = None
        for upsilon in sorted({w.upsilon for w in worlds}):
            symbols = set()
            for name in self._output_urelations(phi, upsilon):
                symbols.update(self.urel_meta[name]["values"])
            shared = symbols if shared is None else shared & symbols
        if not shared:
            raise UnknownSymbol(
                f"hypotheses of phenomenon {phi} share no output symbol; "
                "map one explicitly"
            )
        if len(shared) > 1:
            raise BadInput(
                f"phenomenon {phi} has several shared output symbols "
                f"({sorted(shared)}); map one explicitly"
            )
        return shared.pop()

    def observation_mapping(self, phi, mapping: dict):
        """Split symbol-to-column mappings into index and value picks.

        The caller only names symbols; which one is the series index
        follows from the deployed schemas.
        """
        if not mapping:
            return None, None, None
        self._require_worlds(phi)
        index_symbols, value_symbols = set(), set()
        for meta in self.urel_meta.values():
            if meta.get("kind") == "output" and meta.get("phi") == phi:
                index_symbols.add(meta["index"])
                value_symbols.update(meta["values"])
        index_column = value_column = value_symbol = None
        for symbol, column in mapping.items():
            if symbol in index_symbols:
                index_column = column
            elif symbol in value_symbols:
                value_column = column
                value_symbol = symbol
            else:
                raise UnknownSymbol(
                    f"{symbol!r} is not an output or index symbol of "
                    f"phenomenon {phi}"
                )
        return index_column, value_column, value_symbol

    def observation_from_samples(self, phi, samples, value_symbol=None):
        """Turn bare [index, value] pairs into an observation set.

        Header-less input, so the display names fall back to the
        schema's index symbol and the resolved value symbol.
        """
        if not samples:
            raise EmptyObservationSet("no observation samples given")
        worlds = self._require_worlds(phi)
        if value_symbol is None:
            value_symbol = self._default_value_symbol(phi, worlds)
        index_name = None
        for meta in self.urel_meta.values():
            if meta.get("kind") == "output" and meta.get("phi") == phi:
                index_name = meta["index"]
                break
        points = []
        seen = set()
        for pair in samples:
            try:
                index_value, value = pair
                point = (float(index_value), float(value))
            except (TypeError, ValueError) as exc:
                raise BadInput(f"bad observation sample {pair!r}") from exc
            if point[0] in seen:
                raise BadInput(
                    f"duplicate observation at {index_name}={point[0]:g}"
                )
            seen.add(point[0])
            points.append(point)
        observations = ObservationSet(index_name or "t", value_symbol, points)
        return observations, value_symbol

    def predictions_obj(self, phi) -> dict:
        worlds = self._require_worlds(phi)
        out = {"phenomenon": phi, "worlds": []}
        for world in worlds:
            entry = {
                "upsilon": world.upsilon,
                "tid": world.tid,
                "prior": world_prob(world.condition, self.world),
                "series": {},
            }
            for name in self._output_urelations(phi, world.upsilon):
                meta = self.urel_meta[name]
                entry["index"] = meta["index"]
                for symbol in meta["values"]:
                    series = self._series(phi, world, symbol)
                    entry["series"][symbol] = [
                        [t, series[t]] for t in sorted(series)
                    ]
            out["worlds"].append(entry)
        return out

    def condition(self, phi, observations, sigma=None, at=None,
                  value_symbol=None, write_back=True):
        """Condition phenomenon phi's worlds on observations.

        Returns the report plus the per-world series used, so callers
        can render figures without recomputing.
        """
        worlds = self._require_worlds(phi)
        if value_symbol is None:
            value_symbol = self._default_value_symbol(phi, worlds)
        if sigma is None:
            sigma = default_sigma(observations)
        if at is None:
            at = max(index for index, _ in observations.points)

        priors = [world_prob(w.condition, self.world) for w in worlds]
        surviving = [(w, p) for w, p in zip(worlds, priors) if p > 0]
        worlds = [w for w, _ in surviving]
        priors = [p for _, p in surviving]
        series_by_world = {
            (w.upsilon, w.tid): self._series(phi, w, value_symbol)
            for w in worlds
        }
        posteriors = condition_worlds(worlds, priors, series_by_world,
                                      observations, sigma)
        report = compute_report(worlds, priors, series_by_world,
                                observations, sigma, at, posteriors)
        if write_back:
            self._write_back(phi, worlds, posteriors)
        return report, series_by_world, value_symbol, sigma

    def _write_back(self, phi, worlds, posteriors):
        joint_id = f"w{phi}"
        retired = {
            var_id
            for var_id, var in self.variables.items()
            if var.phenomenon == phi
        }
        self._pending_archive = self.world.to_csv()

        for name in list(self.urelations):
            self.urelations[name] = rewrite_relation(
                self.urelations[name], retired, worlds, joint_id
            )
        for var_id in retired:
            del self.variables[var_id]
            self.world.remove_variable(var_id)
        joint = joint_variable(joint_id, phi, worlds, retired)
        self.variables[joint_id] = joint
        self.world.set_marginals(joint_id, posteriors)
        self.joint[phi] = joint_id
        self.worlds[phi] = collapsed_worlds(worlds, joint_id)
        for upsilon in self.catalog.targets_of(phi):
            if self.stages[(phi, upsilon)] == STAGE_UINTRO:
                self.stages[(phi, upsilon)] = STAGE_CONDITIONED

    # ----- read-side objects

    def catalog_obj(self) -> dict:
        return {
            "phenomena": [
                {"id": p.phenomenon_id, "description": p.description}
                for p in self.catalog.phenomena
            ],
            "hypotheses": [
                self.hypothesis_obj(h.hypothesis_id)
                for h in self.catalog.hypotheses
            ],
            "h0": [[phi, upsilon] for phi, upsilon in self.catalog.h0],
            "stages": [
                {"phi": phi, "upsilon": upsilon, "stage": stage}
                for (phi, upsilon), stage in sorted(self.stages.items())
            ],
            "urelations": sorted(self.urelations, key=_urelation_sort_key),
        }

    def world_table_obj(self) -> dict:
        return {
            "variables": [
                self.variables[vid].to_obj()
                for vid in sorted(self.variables, key=var_sort_key)
            ],
            "marginals": [
                {"var": var_id, "val": value,
                 "prob": self.world.entries[(var_id, value)]}
                for var_id, value in sorted(
                    self.world.entries,
                    key=lambda k: (var_sort_key(k[0]), k[1]),
                )
            ],
        }

    def relation_obj(self, name, where=None) -> dict:
        if name in self.store.relations:
            relation = self.store.get(name)
            return {
                "name": name,
                "kind": "certain",
                "attributes": list(relation.attributes),
                "keys": sorted((sorted(k) for k in relation.keys),
                               key=lambda k: (len(k), k)),
                "rows": relation.select(where),
            }
        if name in self.urelations:
            urelation = self.urelations[name]
            return {
                "name": name,
                "kind": "uncertain",
                "columns": list(urelation.columns),
                "tuples": [
                    {
                        "condition": [[v, k] for v, k in item.condition],
                        "data": urelation.data_row(item),
                    }
                    for item in urelation.select(where)
                ],
            }
        raise UnknownRelation(name)


def _urelation_sort_key(name):
    head = name.rstrip("0123456789")
    tail = name[len(head):]
    return (head, int(tail) if tail else -1)
