"""Base class for the errors raised by the curriculum apps.

Each app declares its own subclasses in its `exceptions.py`, with a default
message and a short code, the way a REST API declares its exceptions.
"""


class CurriculumError(Exception):
    """Root of all domain errors. `detail` overrides the class default message."""

    default_detail = 'Curriculum error'
    default_code = 'error'

    def __init__(self, detail=None, code=None):
        self.detail = detail if detail is not None else self.default_detail
        self.code = code if code is not None else self.default_code
        super().__init__(self.detail)

    def __str__(self):
        return str(self.detail)

    def __reduce__(self):
        # Subclasses take extra constructor arguments; compare workers send errors back pickled.
        return _restore_error, (type(self), self.__dict__)


def _restore_error(cls, state):
    error = cls.__new__(cls)
    Exception.__init__(error, state.get('detail'))
    error.__dict__.update(state)
    return error
