from curriculum_project.exceptions import CurriculumError


class InvalidDistribution(CurriculumError):
    """Class to generate exceptions for probability vectors that cannot be normalized or scored."""

    default_detail = 'Invalid class distribution'
    default_code = 'invalid_distribution'


class ProviderFailure(CurriculumError):
    """Class to generate exceptions for a probability provider that failed on one example."""

    default_detail = 'Probability provider failed'
    default_code = 'provider_failure'

    def __init__(self, example_id, detail=None):
        self.example_id = example_id
        super().__init__(detail=f'{detail or self.default_detail} for example {example_id}')


class MisalignedInput(CurriculumError):
    default_detail = 'Inputs are not aligned with the score table'
    default_code = 'misaligned_input'
