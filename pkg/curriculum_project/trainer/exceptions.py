from curriculum_project.exceptions import CurriculumError


class NonFiniteLoss(CurriculumError):
    """Class to generate exceptions for a NaN/Inf training loss, which aborts the run."""

    default_detail = 'Non-finite loss'
    default_code = 'non_finite_loss'


class EmptySplit(CurriculumError):
    default_detail = 'Cannot evaluate on an empty split'
    default_code = 'empty_split'


class ClassCountMismatch(CurriculumError):
    default_detail = 'Model and dataset disagree on the number of classes'
    default_code = 'class_count_mismatch'


class FewShotSizeError(CurriculumError):
    default_detail = 'Few-shot size must be between 1 and the training set size'
    default_code = 'few_shot_size'


class InconsistentSeeds(CurriculumError):
    """Class to generate exceptions for strategies aggregated over different seed sets."""

    default_detail = 'Every strategy must be run with the same seeds'
    default_code = 'inconsistent_seeds'
