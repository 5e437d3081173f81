import sys
from pathlib import Path
from src.python.cli.config_parser import parse_config
from src.python.utilities.config_validator import ConfigValidator
from src.python.utilities.errors import ConfigError

def validate_config_file(filepath):
    try:
        parse_config(Path(filepath).read_text(encoding='utf-8'))
        print(f"Validation successful: {filepath} is a valid run configuration.")
        return True
    except ConfigError as e:
        print(f"Validation failed: {filepath} is not a valid run configuration.")
        print(e)
        return False
    except FileNotFoundError:
        print(f"Error: File not found - {filepath}")
        return False

if __name__ == "__main__":
    if len(sys.argv) > 1 and sys.argv[1] == '--template':
        print(ConfigValidator().generate_config_template(), end='')
        sys.exit(0)

    if len(sys.argv) > 1:
        filepaths = sys.argv[1:]
    else:
        # Default to the bundled benchmark configs if no argument is provided
        filepaths = sorted(str(p) for p in Path("config/examples").glob("*.conf"))

    results = [validate_config_file(filepath) for filepath in filepaths]
    if not all(results):
        sys.exit(1)
