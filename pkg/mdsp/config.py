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
import copy
import os

import jsonschema
import jstyleson as json
from addict import Dict

import mdsp.config_schema
from mdsp.config_schema import ROOT_MDSP_CONFIG_SCHEMA
from mdsp.errors import ConfigError
from mdsp.mdsp_logger import logger


class MDSPConfig(dict):
    """A regular dictionary object extended with some utility functions."""

    @classmethod
    def from_json(cls, path) -> 'MDSPConfig':
        with open(path) as f:
            loaded_json = json.load(f)
        MDSPConfig.validate(loaded_json)
        return cls(loaded_json)

    @classmethod
    def from_kv_file(cls, path) -> 'MDSPConfig':
        """Flat `key = value` lines; values are read as JSON when possible and as strings otherwise."""
        loaded = {}
        with open(path) as f:
            for lineno, line in enumerate(f, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                key, sep, value = line.partition("=")
                if not sep:
                    raise ConfigError("{}:{}: expected 'key = value', got '{}'".format(path, lineno, line))
                loaded[key.strip()] = _parse_value(value.strip())
        MDSPConfig.validate(loaded)
        return cls(loaded)

    @classmethod
    def from_file(cls, path) -> 'MDSPConfig':
        if os.path.splitext(path)[1].lower() == ".json":
            return cls.from_json(path)
        return cls.from_kv_file(path)

    @staticmethod
    def validate(loaded_json):
        try:
            jsonschema.validate(loaded_json, schema=ROOT_MDSP_CONFIG_SCHEMA)
        except jsonschema.ValidationError as e:
            logger.error("Invalid mdsp config supplied!")

            # The default exception's __str__ result will contain the entire schema,
            # which is too large to be readable.
            msg = e.message + ". See documentation or {} for the configuration schema definition".format(
                mdsp.config_schema.__file__)
            raise jsonschema.ValidationError(msg)

    def merged(self, overrides: dict) -> 'MDSPConfig':
        """Copy with `overrides` applied; None values leave the current entry untouched."""
        result = MDSPConfig(copy.deepcopy(dict(self)))
        result.update({k: v for k, v in overrides.items() if v is not None})
        MDSPConfig.validate(dict(result))
        return result

    def with_defaults(self) -> 'MDSPConfig':
        result = MDSPConfig({k: copy.deepcopy(v["default"]) for k, v in ROOT_MDSP_CONFIG_SCHEMA["properties"].items()
                             if "default" in v})
        result.update(copy.deepcopy(dict(self)))
        return result

    def as_attr_dict(self) -> Dict:
        return Dict(copy.deepcopy(dict(self)))


def _parse_value(text: str):
    try:
        return json.loads(text)
    except ValueError:
        return text
