# src/python/utilities/config_validator.py

from typing import Dict, Optional
import json
import logging
from pathlib import Path
import yaml
import jsonschema

from .errors import ConfigError

SCHEMA_DIR = Path(__file__).parent / 'schemas'
TOLERANCES_FILE = SCHEMA_DIR / 'check_tolerances.yaml'


def load_default_tolerances(path: Optional[Path] = None) -> Dict[str, float]:
    """Packaged check tolerances, as a fresh dict."""
    path = TOLERANCES_FILE if path is None else Path(path)
    with open(path, 'r') as f:
        data = yaml.safe_load(f) or {}
    return {str(k): float(v) for k, v in data.items()}


class ConfigValidator:
    """
    Schema validation for run configurations.
    """

    def __init__(self):
        """
        Loads every JSON schema in the `schemas` directory next to this file,
        keyed by file stem (`run_config` for run_config.json).
        """
        self.logger = logging.getLogger(__name__)
        self.schemas = self._load_schemas()

    def _load_schemas(self) -> Dict:
        """Load JSON schemas for configuration validation."""
        schemas = {}
        for schema_file in SCHEMA_DIR.glob('*.json'):
            with open(schema_file, 'r') as f:
                schemas[schema_file.stem] = json.load(f)
        return schemas

    def _schema(self, config_type: str) -> Dict:
        schema = self.schemas.get(config_type)
        if not schema:
            raise ConfigError(f"No schema found for config type: {config_type}")
        return schema

    def validate_config(self, config: Dict, config_type: str = 'run_config',
                        lines: Optional[Dict[str, int]] = None) -> bool:
        """
        Validate typed configuration values against a schema.

        Args:
            config (Dict): Typed values keyed by config key
            config_type (str): Schema name
            lines (Dict[str, int], optional): Source line of each key

        Raises:
            ConfigError: for the first violation, with the line of the offending key
        """
        lines = lines or {}
        validator = jsonschema.Draft7Validator(self._schema(config_type))
        errors = sorted(validator.iter_errors(config), key=lambda e: [str(p) for p in e.path])
        if errors:
            error = errors[0]
            key = str(error.path[0]) if error.path else None
            if key == 'tol' and len(error.path) > 1:
                key = f"tol.{error.path[1]}"
            self.logger.error(f"Configuration validation error: {error.message}")
            raise ConfigError(
                f"{key + ': ' if key else ''}{error.message}",
                line=lines.get(key),
                code='schema_violation'
            )
        return True

    def defaults(self, config_type: str = 'run_config') -> Dict:
        return {
            prop: details['default']
            for prop, details in self._schema(config_type).get('properties', {}).items()
            if 'default' in details
        }

    def generate_config_template(self, config_type: str = 'run_config') -> str:
        """key=value template from the schema, one commented description per key."""
        lines = []
        defaults = self.defaults(config_type)
        for prop, details in self._schema(config_type).get('properties', {}).items():
            lines.append(f"# {details.get('description', prop)}")
            if prop == 'tol':
                for name, value in load_default_tolerances().items():
                    lines.append(f"# tol.{name}={value:g}")
                continue
            default = defaults.get(prop)
            if isinstance(default, list):
                value = ','.join(str(v) for v in default)
            elif isinstance(default, bool):
                value = str(default).lower()
            elif default is None:
                value = f"<{prop}>"
            else:
                value = str(default)
            lines.append(f"{prop}={value}")
        return '\n'.join(lines) + '\n'
