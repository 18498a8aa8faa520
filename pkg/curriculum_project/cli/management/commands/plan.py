"""Debug dump of the epoch plans a strategy builds for a dataset."""

from cli.base import CurriculumCommand
from cli.config import train_config
from cli.manifest import manifest_path
from cli.output import write_jsonl
from corpus.tokenizer import token_lengths
from samplers.models import Strategy
from samplers.plans import epoch_rng, make_plan
from samplers.serializers import plan_records
from trainer.loop import initial_scores


class Command(CurriculumCommand):
    help = 'Write {epoch, position, example_id, partition_tag} rows for every planned epoch of the first seed.'

    def add_arguments(self, parser):
        self.add_dataset_arguments(parser, splits=False)
        self.add_scoring_arguments(parser)
        self.add_training_arguments(parser)
        self.add_output_arguments(parser, directory=False)

    def run(self, **options):
        resolved = self.resolve(options)
        config = train_config(resolved)
        out = self.check_out_file(options['out'], options['force'])
        dataset = self.load_single(options['dataset'], resolved)
        manifest = self.start_manifest(resolved, [options['dataset'], config.scores_path])
        seed = config.seeds[0]

        scores = None if config.strategy.is_baseline else initial_scores(dataset, config, seed)[0]
        length_index = None
        if config.strategy is Strategy.LENGTH:
            length_index = token_lengths(dataset, max_tokens=config.max_tokens)
        records = []
        for epoch in range(1, config.epochs + 1):
            plan = make_plan(config.strategy, scores, dataset, epoch_rng(seed, epoch), length_index=length_index,
                             batch_size=config.batch_size, split=config.partition, seed=seed, epoch=epoch)
            records.extend(plan_records(plan))

        manifest.add_output(write_jsonl(out, records))
        manifest.finish(manifest_path(out))
        self.stdout.write(f'Planned {config.epochs} epoch(s) of {config.strategy.value} over {len(dataset)} examples')
