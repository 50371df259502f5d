"""
Scenario file: budgets and S/R designations per (mode, phase), big-M policy,
tolerances, and an optional generator spec.
"""

from typing import Optional

from pydantic import BaseModel, ValidationError

from ..exceptions import FileFormatError
from ..models import ScenarioConfig
from ..network.generators import GeneratorSpec
from .common import PathLike, atomic_write_text, dump_document, read_document, validation_message

SCENARIO_FORMAT = "dadres-scenario"
SCENARIO_VERSION = 1


class ScenarioFile(BaseModel):
    scenario: ScenarioConfig
    generator: Optional[GeneratorSpec] = None


def save_scenario(scenario: ScenarioConfig, path: PathLike, generator: Optional[GeneratorSpec] = None) -> None:
    body = {"scenario": scenario.model_dump(mode="json")}
    if generator is not None:
        body["generator"] = generator.model_dump(mode="json", exclude_none=True)
    atomic_write_text(path, dump_document(SCENARIO_FORMAT, SCENARIO_VERSION, body))


def load_scenario_file(path: PathLike) -> ScenarioFile:
    doc = read_document(path, SCENARIO_FORMAT, SCENARIO_VERSION)
    if "scenario" not in doc:
        raise FileFormatError("missing 'scenario' section", path=str(path))
    try:
        return ScenarioFile.model_validate({"scenario": doc["scenario"], "generator": doc.get("generator")})
    except ValidationError as e:
        raise FileFormatError(validation_message(e), path=str(path)) from e


def load_scenario(path: PathLike) -> ScenarioConfig:
    return load_scenario_file(path).scenario


def load_generator_spec(path: PathLike) -> GeneratorSpec:
    """Generator section of a scenario file (the scenario section may be absent)."""
    doc = read_document(path, SCENARIO_FORMAT, SCENARIO_VERSION)
    if not doc.get("generator"):
        raise FileFormatError("no 'generator' section", path=str(path))
    try:
        return GeneratorSpec.model_validate(doc["generator"])
    except ValidationError as e:
        raise FileFormatError(validation_message(e), path=str(path)) from e
