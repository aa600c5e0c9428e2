from dataclasses import asdict

from boundary_dimension.management.base import ComputationCommand
from boundary_dimension.poincare import (
    ParabolicSequence, PowerSequence, critical_exponent, gauge_gap, poincare_partial, verify_dichotomy
)


class Command(ComputationCommand):
    help = 'Poincare series partial sums and the critical exponent of a parabolic group'
    subcommand = 'poincare'

    def run(self, config):
        group = self.group(config)
        radius = config.integer('poincare.radius', 100, minimum=1)
        self.truncations['poincare.radius'] = radius
        s_values = [config.number(f'poincare.s.{index}', minimum=0)
                    for index in range(len(config.get('poincare.s', [])))] or [0.25, 0.5, 0.75, 1.0]
        samples = [poincare_partial(group, s, radius, config.threads) for s in s_values]
        exponent = critical_exponent(group, config.tolerance, threads=config.threads)
        gap = gauge_gap(group, config.integer('poincare.gauge_radius', min(radius, 10 ** 4), minimum=1))

        writer = self.writer
        writer.write_csv('poincare.csv', [sample.as_row() for sample in samples])
        writer.write_json('poincare.json', {
            'group': str(group),
            'critical_exponent': exponent,
            'target': group.rank / 2,
            'gauge_gap': {'minimum': gap.minimum, 'maximum': gap.maximum, 'spread': gap.spread},
            'dichotomy': [dict(asdict(report), consistent=report.consistent)
                          for report in map(verify_dichotomy, self.sequences(config))],
        })
        return f'{group}: critical exponent in [{exponent.s_low:.6g}, {exponent.s_high:.6g}]'

    def sequences(self, config):
        rules = []
        for index in range(len(config.get('dichotomy.sequences', []))):
            key = f'dichotomy.sequences.{index}'
            kind = config.choice(f'{key}.kind', ('power', 'parabolic'))
            if kind == 'power':
                rules.append(PowerSequence(config.number(f'{key}.power', positive=True)))
            else:
                rules.append(ParabolicSequence(config.number(f'{key}.s', positive=True),
                                               config.number(f'{key}.length', 1.0, positive=True)))
        return rules
