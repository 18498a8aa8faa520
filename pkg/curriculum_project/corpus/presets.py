"""Task presets: label names, prompt template and one keyword per class.

A masked language model is not part of this project. The presets document the
contract an external scoring pipeline follows: render the prompt, read the
probability of each class keyword at the mask position, and hand those
probabilities back as a score file (`probs` in label order, or `token_probs`
keyed by keyword).
"""

from dataclasses import dataclass
from typing import Optional, Tuple

from scoring.difficulty import normalize_restricted

MASK = '[MASK]'


@dataclass(frozen=True)
class TaskPreset:
    name: str
    label_names: Tuple[str, ...]
    keywords: Tuple[str, ...]
    template: str
    split: Tuple[float, ...]
    pair_template: Optional[str] = None

    @property
    def class_count(self):
        return len(self.label_names)

    def render_prompt(self, example):
        """Prompt string for the external pipeline; the mask token marks the class slot."""
        if example.text_pair is not None:
            if self.pair_template is None:
                raise ValueError(f'preset {self.name!r} does not take text pairs')
            return self.pair_template.format(premise=example.text, hypothesis=example.text_pair, mask=MASK)
        return self.template.format(text=example.text, mask=MASK)

    def keyword_vector(self, token_probs):
        """Class-ordered probabilities picked from a keyword -> probability mapping (missing keyword -> 0)."""
        return [float(token_probs.get(keyword, 0.0)) for keyword in self.keywords]

    def verbalize(self, token_probs):
        """Restrict token probabilities to this preset's keywords and renormalize."""
        return normalize_restricted(self.keyword_vector(token_probs))


PRESETS = {
    preset.name: preset
    for preset in (
        TaskPreset(
            name='sst2',
            label_names=('negative', 'positive'),
            keywords=('bad', 'great'),
            template='{text} this was a {mask} movie.',
            split=(0.8, 0.2),
        ),
        TaskPreset(
            name='sst5',
            label_names=('very negative', 'negative', 'neutral', 'positive', 'very positive'),
            keywords=('terrible', 'bad', 'okay', 'great', 'amazing'),
            template='{text} this was a {mask} movie.',
            split=(0.8, 0.2),
        ),
        TaskPreset(
            name='hsol',
            label_names=('hate speech', 'offensive', 'neither'),
            keywords=('hateful', 'offensive', 'neutral'),
            template='{text} this was {mask}.',
            split=(0.8, 0.1, 0.1),
        ),
        TaskPreset(
            name='xnli',
            label_names=('entailment', 'neutral', 'contradiction'),
            keywords=('entailed', 'neutral', 'contradictory'),
            template='{text} they are {mask}.',
            pair_template='Sentence 1 is {premise}, sentence 2 is {hypothesis}. They are {mask}.',
            split=(0.8, 0.2),
        ),
    )
}


def get_preset(name):
    try:
        return PRESETS[name]
    except KeyError:
        raise ValueError(f'unknown preset {name!r}, expected one of {", ".join(sorted(PRESETS))}')
