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

Exception hierarchy shared by the solver library and the command-line front end.

Every error raised deliberately by `mdsp` derives from `MDSPError`, so callers can
catch the whole family at once; the value-related ones also derive from `ValueError`.
"""


class MDSPError(Exception):
    pass


class DomainError(MDSPError, ValueError):
    """A point lies outside the domain of the subdifferential of the distance-generating function."""


class DimensionMismatch(MDSPError, ValueError):
    pass


class NonFiniteInput(MDSPError, ValueError):
    pass


class NonFiniteGradient(NonFiniteInput):
    pass


class ConfigError(MDSPError):
    pass


class MissingSolution(MDSPError):
    pass


class MissingHalfStep(MDSPError):
    pass


class Uncertifiable(MDSPError):
    """The step-size family has no analytic summability data for the requested check."""


class EmptyEnsemble(MDSPError):
    pass


class RecordFormatError(MDSPError):
    """A stored trajectory could not be parsed."""
