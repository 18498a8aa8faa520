"""Write a synthetic labeled corpus for desk-scale runs."""

from django.core.management.base import CommandError

from cli.base import CurriculumCommand
from corpus.loaders import FORMATS, save_dataset
from corpus.synthetic import make_corpus


class Command(CurriculumCommand):
    help = 'Generate a corpus whose classes own disjoint vocabularies, with optional label noise.'

    def add_arguments(self, parser):
        parser.add_argument('--size', type=int, default=1000)
        parser.add_argument('--class-count', type=int, default=2)
        parser.add_argument('--signal', type=float, nargs=2, default=(1.0, 1.0), metavar=('LOW', 'HIGH'),
                            help='range of the per-example share of class-specific words')
        parser.add_argument('--noise', type=float, default=0.0, help='fraction of flipped labels')
        parser.add_argument('--pair', action='store_true', help='also write a text_pair field')
        parser.add_argument('--seed', type=int, default=0)
        parser.add_argument('--format', choices=FORMATS, default='jsonl')
        parser.add_argument('--out', required=True, help='output file')
        parser.add_argument('--force', action='store_true')

    def run(self, **options):
        if options['size'] < options['class_count'] or options['class_count'] < 2:
            raise CommandError('need at least two classes and one example per class', returncode=2)
        if not 0 <= options['noise'] <= 1:
            raise CommandError('--noise must be between 0 and 1', returncode=2)
        out = self.check_out_file(options['out'], options['force'])
        dataset = make_corpus(options['size'], class_count=options['class_count'], signal=tuple(options['signal']),
                              noise=options['noise'], pair=options['pair'], seed=options['seed'])
        save_dataset(dataset, out, format=options['format'])
        self.stdout.write(f'Wrote {len(dataset)} examples to {out}')
