from boundary_dimension.management.base import AssertionFailed, ComputationCommand
from boundary_dimension.verification import verify_main


class Command(ComputationCommand):
    help = 'Check s_inf against the gap exponents and the box dimension of the end points'
    subcommand = 'verify-main'

    def run(self, config):
        keys = config.partition_keys()
        if not keys:
            config.fail('verify-main needs a partition or a list of partitions', 'partitions')
        reports = []
        for key in keys:
            partition = self.partition(config, key)
            perturbation = config.get(f'{key}.perturbation', None)
            if perturbation is not None:
                perturbation = {'c': config.number(f'{key}.perturbation.c', positive=True),
                                'replacement': config.get(f'{key}.perturbation.replacement')}
            reports.append(verify_main(
                partition,
                tol=config.tolerance,
                box_slack=config.number('verify.box_slack', 0.05, positive=True),
                deltas=self.deltas(config, 'verify'),
                log_n_max=config.number('verify.log_n_max', 1e12, positive=True),
                perturbation=perturbation,
                threads=config.threads,
            ))

        writer = self.writer
        writer.write_csv('verify_main.csv', [
            dict(assertion.as_row(), subject=report.subject) for report in reports for assertion in report.assertions
        ], columns=['subject', 'name', 'verdict', 'statement'])
        writer.write_json('verify_main.json', {'reports': [report.as_dict() for report in reports]})
        summary = '\n'.join(f'{report.subject}: {report.verdict.value}' for report in reports)
        if any(report.failed for report in reports):
            raise AssertionFailed(f'Assertion failed\n{summary}')
        return summary
