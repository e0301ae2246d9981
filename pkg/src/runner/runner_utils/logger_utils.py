import sys

from loguru import logger

from engine_utils.directory_info import DirectoryInfo
from runner.runner_data_models.logger_config_data import LoggerConfigData


def config_loggers(in_logger_config: LoggerConfigData):
    logger.remove()
    # stdout is reserved for CSV output of the CLI
    logger.add(sys.stderr, level=in_logger_config.log_level)
    if in_logger_config.log_file:
        log_path = DirectoryInfo.resolve_path(in_logger_config.log_file)
        logger.add(log_path, level=in_logger_config.log_level, rotation="10 MB", retention=10,
                   encoding="utf-8", enqueue=True)
    logger.debug(f"Set log level to {in_logger_config.log_level}")
