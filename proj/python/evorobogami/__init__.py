# Copyright 2026 The EvoRobogami Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Legged-robot design workbench: MAP-Elites with human seeding.

Genomes, seed pools and results are plain dicts and lists using the field
names of the JSON design files.
"""

from ._core import (
    BusyError,
    ConfigError,
    NotFoundError,
    QuotaError,
    SequenceError,
    StudyService,
    ValidationError,
    analyze,
    build_phenotype,
    coverage_milestones,
    crossover,
    deduplicate,
    features,
    fitness,
    fitness_milestones,
    generate_synthetic_seeds,
    height_at,
    mann_whitney_u,
    mirror,
    mutate,
    neutral_genome,
    random_genome,
    run,
    select_seeds,
    simulate,
    terrain,
    validate,
)

__all__ = [
    "BusyError",
    "ConfigError",
    "NotFoundError",
    "QuotaError",
    "SequenceError",
    "StudyService",
    "ValidationError",
    "analyze",
    "build_phenotype",
    "coverage_milestones",
    "crossover",
    "deduplicate",
    "features",
    "fitness",
    "fitness_milestones",
    "generate_synthetic_seeds",
    "height_at",
    "mann_whitney_u",
    "mirror",
    "mutate",
    "neutral_genome",
    "random_genome",
    "run",
    "select_seeds",
    "simulate",
    "terrain",
    "validate",
]
