__version__ = '0.3.0'

import logging.config
import os
from pathlib import Path

import yaml

LOGGER_NAME = 'alpha_dirichlet'


def _load(path):
    with open(str(path), 'rt') as f:
        return yaml.safe_load(f.read())


def setup_logging(verbose=False):
    """
    Configure logging from the YAML file selected by MODE: the console
    configuration by default, rotating files under LOG_DIR when MODE=dev.
    Args:
        verbose: (bool) Lower the package logger to INFO.
    """
    from alpha_dirichlet.config.config import get_log_dir

    root_path = Path(__file__).parents[0] / 'config'
    config, fallback = _load(root_path / 'logging.yaml'), None
    if os.environ.get('MODE') == 'dev':
        log_dir = get_log_dir()
        if os.path.isdir(log_dir):
            config = _load(root_path / 'logging_file.yaml')
            for handler in config['handlers'].values():
                if 'filename' in handler:
                    handler['filename'] = os.path.join(
                        log_dir, os.path.basename(handler['filename']))
        else:
            fallback = log_dir
    logging.config.dictConfig(config)
    if verbose:
        logging.getLogger(LOGGER_NAME).setLevel(logging.INFO)
    if fallback:
        logging.getLogger('alpha_dirichlet.init').warning(
            {'log_dir': fallback, 'detail': 'missing, logging to console'})
