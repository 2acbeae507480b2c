"""
 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at
      http://www.apache.org/licenses/LICENSE-2.0
 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
"""
from typing import Dict


def with_attributes(schema: Dict, **kwargs) -> Dict:
    retval = {**schema, **kwargs}
    return retval


_NUMBER = {
    "type": "number"
}

_NONNEGATIVE_NUMBER = {
    "type": "number",
    "minimum": 0
}

_POSITIVE_INTEGER = {
    "type": "integer",
    "minimum": 1
}

_STRING = {
    "type": "string"
}

_BOOLEAN = {
    "type": "boolean"
}

_ARRAY_OF_NUMBERS = {
    "type": "array",
    "items": _NUMBER
}

_ARRAY_OF_STRINGS = {
    "type": "array",
    "items": _STRING
}

METHODS = ["md", "omd", "adam", "optimistic-adam", "rmsprop", "optimistic-rmsprop"]
GEOMETRIES = ["euclidean", "entropic", "auto"]
CLAIMS = ["MonotoneDescent", "NullNondecrease", "NullIdentity", "BoundedOrbit", "PerStepDescentInequality",
          "ErgodicConvergence", "EnsembleConvergenceFraction"]

POINT_SCHEMA = {
    "oneOf": [
        _ARRAY_OF_NUMBERS,
        with_attributes(_STRING, pattern=r"^\s*-?[0-9.eE+-]+(\s*,\s*-?[0-9.eE+-]+)*\s*$")
    ]
}

ROOT_MDSP_CONFIG_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "properties": {
        "problem": with_attributes(_STRING,
                                   description="Label of a builtin problem, see `mdsp list-problems`."),
        "problem_params": with_attributes({"type": "object"},
                                          description="Keyword arguments of the builtin problem factory, "
                                                      "e.g. dim/curvature/coupling for scc-quadratic or "
                                                      "payoff for simplex-game."),
        "method": with_attributes(_STRING, enum=METHODS),
        "geometry": with_attributes(_STRING, enum=GEOMETRIES, default="auto",
                                    description="'auto' attaches negative entropy to simplex blocks and the "
                                                "Euclidean regularizer elsewhere."),
        "step": with_attributes(_STRING, default="const:0.1",
                                description="Step-size schedule: const:<gamma> | power:c=<c>,p=<p> | "
                                            "custom:[<gamma_1>, ...]",
                                examples=["const:0.5", "power:c=1,p=1"]),
        "sigma": with_attributes(_NONNEGATIVE_NUMBER, default=0.0,
                                 description="Standard deviation of the Gaussian gradient noise."),
        "seed": with_attributes({"type": "integer"}, default=0),
        "iterations": with_attributes(_POSITIVE_INTEGER, default=1000),
        "record_every": with_attributes(_POSITIVE_INTEGER, default=1),
        "ensemble": with_attributes(_POSITIVE_INTEGER, default=1,
                                    description="Number of independently seeded runs."),
        "workers": with_attributes({"type": "integer", "minimum": 0}, default=0,
                                   description="Worker processes for ensembles; 0 uses all available cores."),
        "out": with_attributes(_STRING, default="out"),
        "initial_point": with_attributes(POINT_SCHEMA, description="Starting point, e.g. [0.9, 0.5] or '0.9,0.5'."),
        "assert": with_attributes({"type": "array", "items": with_attributes(_STRING, enum=CLAIMS)},
                                  description="Claims checked after the run; failures set exit code 1."),
        "beta1": with_attributes(_NONNEGATIVE_NUMBER, default=0.0, exclusiveMaximum=1),
        "beta2": with_attributes(_NONNEGATIVE_NUMBER, default=0.9, exclusiveMaximum=1),
        "eps": with_attributes(_NUMBER, default=1e-8, exclusiveMinimum=0),
        "lr": with_attributes(_NUMBER, default=1e-4, exclusiveMinimum=0),
        "lr2": with_attributes(_NUMBER, exclusiveMinimum=0, description="Second-pass learning rate, defaults to lr."),
        "paper_literal": with_attributes(_BOOLEAN, default=False,
                                         description="Use the printed second-pass moment recursion of "
                                                     "extra-gradient Adam instead of the symmetric one."),
        "grid": with_attributes({"type": "integer", "minimum": 2},
                                description="Grid points per axis for the coherence probe (box sets only)."),
        "samples": with_attributes(_POSITIVE_INTEGER,
                                   description="Random samples for the coherence probe; a grid takes precedence. "
                                               "Without either the problem's own sampling plan is used."),
        "starts": with_attributes({"type": "array", "items": POINT_SCHEMA},
                                  description="Initial points for phase portraits."),
        "methods": with_attributes({"type": "array", "items": with_attributes(_STRING, enum=METHODS)},
                                   default=["md", "omd"]),
        "alpha": with_attributes(_NUMBER, exclusiveMinimum=0,
                                 description="Constants of the claims checked after a run. Unset ones are taken "
                                             "from the record."),
        "lipschitz": with_attributes(_NUMBER, exclusiveMinimum=0),
        "m_squared": _NONNEGATIVE_NUMBER,
        "threshold": with_attributes(_NUMBER, exclusiveMinimum=0, default=1e-3),
        "required_fraction": with_attributes(_NUMBER, minimum=0, maximum=1, default=0.9),
        "ergodic_radius": with_attributes(_NUMBER, exclusiveMinimum=0, default=0.05),
    },
    "additionalProperties": False
}
