"""Combinatorial train/test cohorts and train-test relation tags.

Every non-empty subset of the available specialties yields one train and one
test cohort (seven pairs for three specialties). Splits are seeded and
reproducible: same seed, same membership; different seed, same counts.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class Relation(str, Enum):
    """How a train set's specialties relate to a test set's."""

    NATIVE = "native"
    PARTIAL = "partial"
    EXTERNAL = "external"
    INTRA = "intra"


class CohortError(ValueError):
    pass


def relation(train_specialties, test_specialties) -> Relation:
    """Native when the sets match, external when disjoint, partial otherwise."""
    a = frozenset(train_specialties)
    b = frozenset(test_specialties)
    if not a or not b:
        raise CohortError("relation undefined for an empty specialty set")
    if a == b:
        return Relation.NATIVE
    if not a & b:
        return Relation.EXTERNAL
    return Relation.PARTIAL


@dataclass(frozen=True)
class Cohort:
    name: str
    role: str  # "train" | "test"
    specialties: frozenset
    sentence_ids: tuple
    composition: dict

    def __post_init__(self):
        if sum(self.composition.values()) != len(self.sentence_ids):
            raise CohortError(f"{self.name}: composition does not sum to cohort size")

    def to_manifest(self) -> dict:
        return {
            "name": self.name,
            "role": self.role,
            "specialties": sorted(self.specialties),
            "sentence_ids": list(self.sentence_ids),
            "composition": {k: self.composition[k] for k in sorted(self.composition)},
        }

    @classmethod
    def from_manifest(cls, obj: dict) -> "Cohort":
        return cls(
            name=obj["name"],
            role=obj["role"],
            specialties=frozenset(obj["specialties"]),
            sentence_ids=tuple(obj["sentence_ids"]),
            composition=dict(obj["composition"]),
        )


def cohort_name(specialties, role: str) -> str:
    return " ".join(sorted(specialties)) + " " + role


def save_cohort(cohort: Cohort, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cohort.to_manifest(), fh, sort_keys=True)
        fh.write("\n")


def load_cohort(path) -> Cohort:
    with open(path, encoding="utf-8") as fh:
        return Cohort.from_manifest(json.load(fh))


MIN_PER_SPECIALTY = 10


def build_cohorts(records, train_fraction: float = 0.7, seed: int = 0) -> list:
    """Build one train and one test cohort per non-empty specialty subset.

    Per specialty, a seeded shuffle assigns floor(n * train_fraction) sentences
    to the train pool and the rest to the test pool. A cohort covering m
    specialties takes the first floor(pool/m) sentences of each component
    specialty's pool, so multi-specialty cohorts have near-equal component
    counts and stay disjoint from their test counterparts by construction.

    Records must all carry labels; duplicated sentence ids keep their first
    record only.
    """
    if not 0.0 < train_fraction < 1.0:
        raise CohortError(f"train_fraction must be in (0, 1), got {train_fraction}")
    by_specialty: dict[str, list[str]] = {}
    seen: set[str] = set()
    for rec in records:
        if rec.label is None:
            raise CohortError(f"record {rec.sentence_id} has no label")
        if rec.sentence_id in seen:
            continue
        seen.add(rec.sentence_id)
        by_specialty.setdefault(rec.specialty, []).append(rec.sentence_id)
    if not by_specialty:
        raise CohortError("no labeled records")
    for spec, ids in sorted(by_specialty.items()):
        if len(ids) < MIN_PER_SPECIALTY:
            raise CohortError(
                f"insufficient data for specialty {spec!r}: {len(ids)} labeled sentences "
                f"(need >= {MIN_PER_SPECIALTY})"
            )

    rng = np.random.Generator(np.random.PCG64(seed))
    train_pool: dict[str, list[str]] = {}
    test_pool: dict[str, list[str]] = {}
    for spec in sorted(by_specialty):
        ids = by_specialty[spec]
        order = rng.permutation(len(ids))
        shuffled = [ids[i] for i in order]
        cut = math.floor(len(ids) * train_fraction)
        train_pool[spec] = shuffled[:cut]
        test_pool[spec] = shuffled[cut:]

    cohorts: list[Cohort] = []
    specialties = sorted(by_specialty)
    subsets = []
    for size in range(1, len(specialties) + 1):
        subsets.extend(itertools.combinations(specialties, size))
    for subset in subsets:
        m = len(subset)
        for role, pool in (("train", train_pool), ("test", test_pool)):
            ids: list[str] = []
            composition: dict[str, int] = {}
            for spec in subset:
                take = len(pool[spec]) // m
                ids.extend(pool[spec][:take])
                composition[spec] = take
            cohorts.append(
                Cohort(
                    name=cohort_name(subset, role),
                    role=role,
                    specialties=frozenset(subset),
                    sentence_ids=tuple(ids),
                    composition=composition,
                )
            )
    return cohorts
