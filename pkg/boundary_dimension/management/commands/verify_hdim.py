from boundary_dimension.management.base import AssertionFailed, ComputationCommand
from boundary_dimension.verification import default_orbit_deltas, verify_hdim


class Command(ComputationCommand):
    help = 'Check that critical exponent, counting rate and orbit box dimension all equal k/2'
    subcommand = 'verify-hdim'

    def run(self, config):
        group = self.group(config)
        xi = self.boundary_point(config, group)
        radius = config.integer('orbit.radius', minimum=1)
        t_max = config.number('counting.t_max', 25.0, positive=True)
        self.truncations.update({'orbit.radius': radius, 'counting.t_max': t_max})
        if 'j_min' in config.section('verify') or 'j_max' in config.section('verify'):
            deltas = self.deltas(config, 'verify')
        else:
            deltas = default_orbit_deltas(group.rank, radius)
        report = verify_hdim(group, xi, radius, t_max, config.integer('counting.levels', 25, minimum=3),
                             config.tolerance, deltas, threads=config.threads)

        writer = self.writer
        writer.write_csv('verify_hdim.csv', [assertion.as_row() for assertion in report.assertions],
                         columns=['name', 'verdict', 'statement'])
        writer.write_json('verify_hdim.json', report.as_dict())
        summary = f'{report.subject}: {report.verdict.value}'
        if report.failed:
            raise AssertionFailed(f'Assertion failed: {summary}')
        return summary
