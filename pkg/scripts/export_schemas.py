"""Write the CLI JSON schemas to docs/schemas/ (one file per command plus the envelope)."""

import argparse
import json
from pathlib import Path

from poincare_lab.schemas import ENVELOPE_SCHEMA, PAYLOAD_SCHEMAS, SCHEMA_VERSION


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default=str(Path(__file__).resolve().parent.parent / "docs" / "schemas"))
    args = parser.parse_args()
    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    docs = {"envelope": ENVELOPE_SCHEMA, **PAYLOAD_SCHEMAS}
    for name, schema in docs.items():
        body = {"$schema": "https://json-schema.org/draft/2020-12/schema", "version": SCHEMA_VERSION, **schema}
        (dest / f"{name}.json").write_text(json.dumps(body, indent=2) + "\n")
    print(f"wrote {len(docs)} schemas to {dest}")


if __name__ == "__main__":
    main()
