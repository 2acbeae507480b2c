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
import inspect
from typing import Any, Callable, Dict, Iterator, List, Optional


class Registry:
    """
    A named family of interchangeable implementations (problems, step schedules, solvers,
    optimizers, claims). Entries are added with the `register` decorator and looked up by
    the label users type on the command line or in config files.
    """

    def __init__(self, family: str):
        self.family = family
        self._entries = {}  # type: Dict[str, Any]

    def register(self, label: Optional[str] = None) -> Callable[[Any], Any]:
        def wrap(obj):
            key = label if label is not None else obj.__name__
            if key in self._entries:
                raise KeyError("'{}' is already registered in {}".format(key, self.family))
            self._entries[key] = obj
            return obj

        return wrap

    def get(self, label: str) -> Any:
        try:
            return self._entries[label]
        except KeyError:
            raise KeyError("Unknown {} '{}' (known: {})".format(self.family, label, ", ".join(self.names())))

    def names(self) -> List[str]:
        return sorted(self._entries)

    def summary(self, label: str) -> str:
        """First docstring line of an entry, or an empty string."""
        doc = inspect.getdoc(self.get(label))
        return doc.splitlines()[0] if doc else ""

    def __contains__(self, label) -> bool:
        return label in self._entries

    def __iter__(self) -> Iterator[str]:
        return iter(self.names())

    def __len__(self) -> int:
        return len(self._entries)

    def __repr__(self):
        return "Registry({}: {})".format(self.family, ", ".join(self.names()))
