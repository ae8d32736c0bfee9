import os
from dataclasses import dataclass

from alpha_dirichlet.utils.io_util import CLOSURE_RENORMALIZE, IoUtil
from alpha_dirichlet.utils.response_error import IO_ERROR, InputError, raise_error


@dataclass(frozen=True)
class DatasetInfo:
    """
    Registered real dataset. The data files are not shipped; the entry
    holds what a user supplied copy must look like and the published
    estimates it should reproduce.
    """
    name: str
    file_name: str
    component_labels: tuple
    source: str
    reference_alpha: float
    reference_rows: dict


REGISTRY = {
    'mammals': DatasetInfo(
        name='mammals', file_name='mammals.csv',
        component_labels=('water', 'protein', 'fat', 'lactose', 'ash'),
        source='Milk composition of 24 mammals, Hartigan (1975)',
        reference_alpha=0.06,
        reference_rows={
            'DirectMLE': (793.908, 671.054, 680.629, 663.055, 604.305),
            'Asymptotic1': (782.297, 668.362, 677.964, 660.235, 597.352),
            'Asymptotic2': (793.673, 670.856, 680.428, 662.859, 604.127),
        }),
    'clams': DatasetInfo(
        name='clams', file_name='clams.csv',
        component_labels=('dl', 'dm', 'ds'),
        source='East Bay clams, colour-size proportions, Aitchison (1986)',
        reference_alpha=0.28,
        reference_rows={
            'DirectMLE': (232.218, 224.377, 222.197),
            'Asymptotic1': (231.568, 223.800, 221.592),
            'Asymptotic2': (231.990, 224.156, 221.979),
        }),
    'oecd': DatasetInfo(
        name='oecd', file_name='oecd.csv',
        component_labels=('PCINC', 'AGR', 'IND', 'SER'),
        source='OECD income and sector shares, DASL',
        reference_alpha=0.14,
        reference_rows={
            'DirectMLE': (212.965, 129.782, 143.360, 136.907),
            'Asymptotic1': (199.034, 124.925, 139.824, 132.928),
            'Asymptotic2': (212.669, 129.601, 143.161, 136.716),
        }),
    'grta': DatasetInfo(
        name='grta', file_name='grta.csv',
        component_labels=('Killed', 'Seriously injured', 'Slightly injured'),
        source='Greek road traffic accident casualties, national statistics',
        reference_alpha=-0.04,
        reference_rows={
            'DirectMLE': (28366.65, 28109.32, 25420.99),
            'Asymptotic1': (28305.94, 28057.80, 25320.62),
            'Asymptotic2': (28366.36, 28109.03, 25420.73),
        }),
}


def get_info(name):
    try:
        return REGISTRY[name.lower()]
    except KeyError:
        raise InputError(f'Unknown dataset {name!r}, registered: '
                         f'{", ".join(sorted(REGISTRY))}') from None


def validate_labels(dataset, name):
    """Check that a loaded file carries the registered component labels.
    Args:
        dataset: (Dataset) Loaded data.
        name: (str) Registered dataset name.
    Returns:
        (Dataset) The dataset, unchanged.
    Raises:
        InputError: Labels differ from the registered ones.
    """
    info = get_info(name)
    found = tuple(label.strip().lower() for label in dataset.component_labels)
    expected = tuple(label.lower() for label in info.component_labels)
    if found != expected:
        raise_error(IO_ERROR, f'{name} expects columns {list(info.component_labels)}, '
                    f'found {list(dataset.component_labels)}')
    return dataset


def load_registered(name, data_dir, **options):
    """Load and validate a user supplied copy of a registered dataset.
    Args:
        name: (str) Registered dataset name.
        data_dir: (str) Directory holding ``<name>.csv``.
        options: Passed to IoUtil.load_csv; closure defaults to renormalize
            since the published tables are percentages or counts.
    Returns:
        (Dataset) Validated dataset.
    """
    info = get_info(name)
    options.setdefault('closure', CLOSURE_RENORMALIZE)
    dataset = IoUtil.load_csv(os.path.join(data_dir, info.file_name),
                              name=info.name, **options)
    return validate_labels(dataset, name)
