from curriculum_project.exceptions import CurriculumError


class MalformedRecord(CurriculumError):
    """Class to generate exceptions for a record that cannot be parsed or validated."""

    default_detail = 'Malformed record'
    default_code = 'malformed_record'

    def __init__(self, line, detail=None):
        self.line = line
        super().__init__(detail=f'{detail or self.default_detail} at line {line}')


class LabelOutOfRange(MalformedRecord):
    """Class to generate exceptions for a label that does not index the declared classes."""

    default_detail = 'label out of range'
    default_code = 'label_out_of_range'


class EmptyDataset(CurriculumError):
    default_detail = 'Dataset file holds no records'
    default_code = 'empty_dataset'


class SplitError(CurriculumError):
    """Class to generate exceptions for split fractions or classes that cannot be stratified."""

    default_detail = 'Cannot split dataset'
    default_code = 'split_error'


class ScoreFileError(CurriculumError):
    """Class to generate exceptions for an external probability file that does not match its dataset."""

    default_detail = 'Invalid score file'
    default_code = 'score_file_error'

    def __init__(self, detail=None, example_id=None):
        self.example_id = example_id
        super().__init__(detail=detail)
