from curriculum_project.exceptions import CurriculumError

STRATEGY_NAMES = ('Random', 'Length', 'E2D', 'D2E', 'SME', 'SMD', 'PME', 'PMD')


class UnknownStrategy(CurriculumError):
    """Class to generate exceptions for a strategy name outside the closed set."""

    default_detail = 'Unknown strategy'
    default_code = 'unknown_strategy'

    def __init__(self, name):
        self.name = name
        super().__init__(detail=f'unknown strategy {name!r}, expected one of: {", ".join(STRATEGY_NAMES)}')


class DirectionMismatch(CurriculumError):
    """Class to generate exceptions for a ranked list sorted the wrong way for a strategy."""

    default_detail = 'Ranking direction does not match the strategy'
    default_code = 'direction_mismatch'


class MissingScores(CurriculumError):
    default_detail = 'Curriculum strategies need difficulty scores'
    default_code = 'missing_scores'


class PartitionMismatch(CurriculumError):
    default_detail = 'Partition sizes must sum to the batch size'
    default_code = 'partition_mismatch'


class ZeroWeights(CurriculumError):
    default_detail = 'At least one sampling weight must be positive'
    default_code = 'zero_weights'


class EmptyPlan(CurriculumError):
    default_detail = 'Cannot plan an epoch over an empty dataset'
    default_code = 'empty_plan'
