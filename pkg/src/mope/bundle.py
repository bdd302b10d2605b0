"""Model bundle directories: canonical manifest plus binary expert files.

Layout: ``mope.json`` (canonical-form JSON manifest), ``base.bin`` (the
pre-trained expert every fine-tuned expert blends against), one
``expert_###.bin`` per cluster, and optionally ``student.bin`` for the
distilled meter model. Round-trips are bit-exact.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass

import numpy as np

from .alphabet import Alphabet
from .clustering import ClusterModel
from .editops import OpSpace
from .errors import DataError
from .expert import NGramExpert
from .features import Standardizer
from .gate import GateConfig
from .offline import OfflineMope
from .online import OnlineMope

MANIFEST_NAME = "mope.json"
SCHEMA_VERSION = 1


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def config_digest(obj) -> str:
    return hashlib.sha256(
        json.dumps(obj, sort_keys=True, ensure_ascii=False).encode("utf-8")
    ).hexdigest()


@dataclass
class Bundle:
    variant: str  # "offline" | "online"
    model: object  # OfflineMope | OnlineMope
    base: NGramExpert
    student: NGramExpert | None
    manifest: dict
    path: str | None = None

    @property
    def meter_model(self):
        """Model the strength meter should serve: the student when present."""
        return self.student if self.student is not None else self.model


def _gate_manifest(gate: GateConfig) -> dict:
    cm = gate.cluster_model
    return {
        "k": cm.k,
        "beta": gate.beta,
        "centers": [[float(v) for v in row] for row in cm.centers],
        "standardizer": {
            "means": [float(v) for v in cm.standardizer.means],
            "stds": [float(v) for v in cm.standardizer.stds],
        },
    }


def _gate_from_manifest(m: dict) -> GateConfig:
    std = Standardizer(
        means=np.array(m["standardizer"]["means"], dtype=float),
        stds=np.array(m["standardizer"]["stds"], dtype=float),
    )
    cluster = ClusterModel(k=m["k"], centers=np.array(m["centers"], dtype=float),
                           standardizer=std)
    return GateConfig(cluster_model=cluster, beta=m["beta"])


def save_bundle(path, model, base: NGramExpert, student: NGramExpert | None = None,
                extras: dict | None = None) -> dict:
    """Write an offline or online model bundle under ``path``."""
    os.makedirs(path, exist_ok=True)
    offline = isinstance(model, OfflineMope)
    expert_files = [f"expert_{j:03d}.bin" for j in range(model.k)]
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "variant": "offline" if offline else "online",
        "alphabet": model.alphabet.symbols,
        **_gate_manifest(model.gate),
        "base": "base.bin",
        "experts": expert_files,
        "student": "student.bin" if student is not None else None,
        "order": base.cfg.order,
        "lambda": base.cfg.lam,
        "config_digest": base.cfg.digest(),
    }
    if not offline:
        manifest["beam_width"] = model.beam_width
        manifest["candidates"] = model.top_k
        manifest["max_ops"] = model.max_ops
        manifest["op_space_max_len"] = model.space.max_len
    if extras:
        manifest["extras"] = extras
    base.save(os.path.join(path, "base.bin"))
    for fname, expert in zip(expert_files, model.experts):
        expert.save(os.path.join(path, fname))
    if student is not None:
        student.save(os.path.join(path, "student.bin"))
    with open(os.path.join(path, MANIFEST_NAME), "w", encoding="utf-8") as fh:
        fh.write(canonical_json(manifest))
    return manifest


def load_bundle(path) -> Bundle:
    manifest_path = os.path.join(path, MANIFEST_NAME)
    if not os.path.isfile(manifest_path):
        raise DataError(f"no {MANIFEST_NAME} manifest under {path}")
    with open(manifest_path, encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise DataError(f"unsupported bundle schema {manifest.get('schema_version')}")
    alphabet = Alphabet(manifest["alphabet"])
    gate = _gate_from_manifest(manifest)
    variant = manifest["variant"]
    if variant == "offline":
        space = alphabet
    elif variant == "online":
        space = OpSpace(alphabet, max_len=manifest["op_space_max_len"])
    else:
        raise DataError(f"unknown bundle variant {variant!r}")
    base = NGramExpert.load(os.path.join(path, manifest["base"]), space)
    experts = [
        NGramExpert.load(os.path.join(path, fname), space, base=base)
        for fname in manifest["experts"]
    ]
    if variant == "offline":
        model = OfflineMope(experts, gate, alphabet)
    else:
        model = OnlineMope(experts, gate, alphabet, space,
                           beam_width=manifest["beam_width"],
                           top_k=manifest["candidates"],
                           max_ops=manifest["max_ops"])
    student = None
    if manifest.get("student"):
        student_path = os.path.join(path, manifest["student"])
        if os.path.isfile(student_path):
            student = NGramExpert.load(student_path, alphabet)
    return Bundle(variant=variant, model=model, base=base, student=student,
                  manifest=manifest, path=str(path))


def attach_student(path, student: NGramExpert) -> dict:
    """Add or replace the distilled student inside an existing bundle."""
    bundle = load_bundle(path)
    student.save(os.path.join(path, "student.bin"))
    manifest = dict(bundle.manifest)
    manifest["student"] = "student.bin"
    with open(os.path.join(path, MANIFEST_NAME), "w", encoding="utf-8") as fh:
        fh.write(canonical_json(manifest))
    return manifest
