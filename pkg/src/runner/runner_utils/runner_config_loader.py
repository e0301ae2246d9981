import os
from typing import Optional, Type, TypeVar

from dynaconf import Dynaconf
from loguru import logger
from pydantic import BaseModel, ValidationError

from engine_utils.directory_info import DirectoryInfo
from mixmatch.common.mixmatch_errors import SuiteConfigError
from mixmatch.data_models.experiment_config_data import ExperimentConfigModel, VerifyConfigModel
from mixmatch.data_models.ingest_config_data import IngestSpec
from mixmatch.data_models.search_config_data import SearchConfigModel
from mixmatch.data_models.suite_config_data import SuiteConfigModel
from mixmatch.harness.ingest import ingest_csv
from mixmatch.problems.suite_builder import make_synthetic_suite
from runner.runner_data_models.logger_config_data import LoggerConfigData

ModelType = TypeVar("ModelType", bound=BaseModel)


def load_config_file(config_path: str, env: str = "default") -> Dynaconf:
    os.environ["ENV_FOR_DYNACONF"] = env
    config_path = DirectoryInfo.resolve_path(config_path)
    if not os.path.isfile(config_path):
        logger.error(f"Config file {config_path} not found!")
        raise SuiteConfigError(f"Config file {config_path} not found")

    logger.info(f"Load config with env {env} from {config_path}")
    return Dynaconf(
        settings_files=[config_path],
        environments=True,
        load_dotenv=True
    )


def load_section(config: Dynaconf, section: str, model_type: Type[ModelType],
                 required: bool = False) -> ModelType:
    values = config.get(section, None)
    if values is None:
        if required:
            raise SuiteConfigError(f"Config section '{section}' is missing")
        values = {}
    if hasattr(values, "to_dict"):
        values = values.to_dict()
    try:
        return model_type.model_validate(values)
    except ValidationError as e:
        logger.error(f"Invalid '{section}' section: {e}")
        raise SuiteConfigError(f"Invalid '{section}' section: {e}") from e


def load_logger_config(config_path: Optional[str], env: str = "default") -> LoggerConfigData:
    if config_path is None:
        return LoggerConfigData()
    return load_section(load_config_file(config_path, env), "logger", LoggerConfigData)


def load_suite_config(config_path: str, env: str = "default"):
    """Returns the suite and search sections of a suite file."""
    config = load_config_file(config_path, env)
    suite_config = load_section(config, "suite", SuiteConfigModel, required=True)
    search_config = load_section(config, "search", SearchConfigModel)
    return suite_config, search_config


def load_experiment_config(config_path: str, env: str = "default") -> ExperimentConfigModel:
    return load_section(load_config_file(config_path, env), "experiment", ExperimentConfigModel, required=True)


def load_verify_config(config_path: Optional[str], env: str = "default") -> VerifyConfigModel:
    if config_path is None:
        return VerifyConfigModel()
    return load_section(load_config_file(config_path, env), "verify", VerifyConfigModel)


def load_ingest_spec(config_path: str, env: str = "default") -> IngestSpec:
    return load_section(load_config_file(config_path, env), "ingest", IngestSpec, required=True)


def load_problem_suite(config_path: str, env: str = "default"):
    """
    Build the suite a config file describes: an `ingest` section yields an
    ingested suite, otherwise the `suite` section a synthetic one. Returns the
    suite with the file's `search` section.
    """
    config = load_config_file(config_path, env)
    search_config = load_section(config, "search", SearchConfigModel)
    if config.get("ingest", None) is not None:
        return ingest_csv(load_section(config, "ingest", IngestSpec)), search_config
    suite_config = load_section(config, "suite", SuiteConfigModel, required=True)
    return make_synthetic_suite(suite_config), search_config
