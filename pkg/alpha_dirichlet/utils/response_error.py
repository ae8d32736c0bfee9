IO_ERROR = 2
DOMAIN_ERROR = 3
CONVERGENCE_ERROR = 4

error_dict = {
    IO_ERROR: {'detail': 'Input error, the file, its cells or the configuration '
                         'could not be read as requested.'},
    DOMAIN_ERROR: {'detail': 'Domain error, a value lies outside the set where '
                             'the operation is defined.'},
    CONVERGENCE_ERROR: {'detail': 'Convergence error, an iterative estimator did '
                                  'not reach its tolerance.'},
}


class AlphaDirichletError(Exception):
    """
    Base class of every error raised by the package. Carries the process
    exit code of its category.
    """
    code = 1

    def __init__(self, msg=None):
        self.detail = msg if msg is not None else response(self.code)['detail']
        super().__init__(self.detail)


class InputError(AlphaDirichletError):
    code = IO_ERROR


class ConfigError(InputError):
    pass


class DomainError(AlphaDirichletError, ValueError):
    code = DOMAIN_ERROR


class DegenerateDataError(DomainError):
    pass


class NumericalRangeError(DomainError):

    def __init__(self, msg=None, component=None):
        self.component = component
        super().__init__(msg)


class ConvergenceError(AlphaDirichletError):
    code = CONVERGENCE_ERROR

    def __init__(self, msg=None, last_iterate=None, grad_norm=None,
                 iterations=None, alpha=None):
        self.last_iterate = last_iterate
        self.grad_norm = grad_norm
        self.iterations = iterations
        self.alpha = alpha
        super().__init__(msg)

    def annotate(self, alpha):
        """Attach the transformation parameter the failing fit was run at.
        Args:
            alpha: (float) Transformation parameter.
        Returns:
            (ConvergenceError) A copy carrying alpha in its message.
        """
        return ConvergenceError(f'{self.detail} (alpha={alpha!r})',
                                last_iterate=self.last_iterate,
                                grad_norm=self.grad_norm,
                                iterations=self.iterations, alpha=alpha)


class FitError(AlphaDirichletError):
    code = CONVERGENCE_ERROR


_error_class = {
    IO_ERROR: InputError,
    DOMAIN_ERROR: DomainError,
    CONVERGENCE_ERROR: ConvergenceError,
}


def raise_error(code, msg=None):
    """
    Raise the error bound to an exit code.
    Args:
        code: (int) Category exit code (2, 3 or 4).
        msg: (str) Message to be carried, the catalogue detail otherwise.
    Raises:
        AlphaDirichletError: Always.
    """
    raise _error_class.get(code, AlphaDirichletError)(msg)


def response(code):
    """Return the catalogue entry of an exit code.
    Args:
        code (int): Exit code.
    Returns:
        dict: Detail of the error category.
    """
    return error_dict.get(code, {'detail': 'Unexpected error.'})
