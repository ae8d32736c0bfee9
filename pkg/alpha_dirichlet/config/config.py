import os

from alpha_dirichlet.utils.response_error import ConfigError


def _environ(name, default, cast):
    try:
        return cast(os.environ[name])
    except KeyError:
        return default
    except ValueError:
        raise ConfigError(f'Environment variable {name} cannot be read as '
                          f'{cast.__name__}: {os.environ[name]!r}')


def get_workers():
    """
    Number of threads used to evaluate independent grid chains.
    Returns:
        (int) Value of the environment variable WORKERS, 1 otherwise.
    """
    return max(1, _environ('WORKERS', 1, int))


def get_alpha_delta():
    """
    Half width of the punctured neighbourhood of zero excluded from alpha
    searches.
    Returns:
        (float) Value of ALPHA_DELTA, 1e-3 otherwise.
    """
    return _environ('ALPHA_DELTA', 1e-3, float)


def get_grid_size():
    """
    Total number of coarse grid points of a profile scan.
    Returns:
        (int) Value of GRID_SIZE, 82 (41 per side) otherwise.
    """
    return _environ('GRID_SIZE', 82, int)


def get_seed():
    """
    Default seed of simulation drivers.
    Returns:
        (int) Value of SEED, 20240601 otherwise.
    """
    return _environ('SEED', 20240601, int)


def get_max_newton_iter():
    """
    Iteration cap of the Dirichlet Newton solver.
    Returns:
        (int) Value of MAX_NEWTON_ITER, 200 otherwise.
    """
    return _environ('MAX_NEWTON_ITER', 200, int)


def get_zero_epsilon():
    """
    Replacement value of the zero-replacement preprocessor.
    Returns:
        (float) Value of ZERO_EPSILON, 1e-6 otherwise.
    """
    return _environ('ZERO_EPSILON', 1e-6, float)


def get_log_dir():
    return _environ('LOG_DIR', '/var/log/alpha_dirichlet/', str)


def get_data_dir():
    """
    Directory holding user supplied copies of the registered datasets.
    Returns:
        (str or None) Value of ALPHA_DIRICHLET_DATA_DIR.
    """
    return _environ('ALPHA_DIRICHLET_DATA_DIR', None, str)


# Closure tolerances of composition construction and strict CSV loading.
SILENT_RENORMALIZE_TOL = 1e-8
STRICT_CLOSURE_TOL = 1e-3
NEWTON_GRAD_TOL = 1e-8
NEWTON_REL_TOL = 1e-10
GOLDEN_BRACKET_WIDTH = 1e-4
