from boundary_dimension.management.base import AssertionFailed, ComputationCommand
from boundary_dimension.selftest import run_selftest


class Command(ComputationCommand):
    help = 'Run the hyperbolic geometry property suite'
    subcommand = 'selftest'
    requires_config = False

    def run(self, config):
        seed = config.integer('selftest.seed', config.seed, minimum=0)
        samples = config.integer('selftest.samples', 10 ** 4, minimum=1)
        report = run_selftest(seed, samples,
                              progress=lambda result: self.stdout.write(
                                  f'{result.name}: {result.passed}/{result.total}'))
        self.writer.write_csv('selftest.csv', [result.as_row() for result in report.results])
        summary = f'{report.passed}/{report.total} checks passed'
        if not report.ok:
            raise AssertionFailed(summary)
        return summary
