from boundary_dimension.management.base import ComputationCommand
from boundary_dimension.poincare import counting_exponent


class Command(ComputationCommand):
    help = 'Lattice counts #{N : d(o, N.o) <= t} and their exponential growth rate'
    subcommand = 'counting'

    def run(self, config):
        group = self.group(config)
        t_max = config.number('counting.t_max', 25.0, positive=True)
        levels = config.integer('counting.levels', 25, minimum=3)
        self.truncations['counting.t_max'] = t_max
        counting = counting_exponent(group, t_max, levels, config.threads)
        writer = self.writer
        writer.write_csv('counting.csv', counting.rows(), columns=['t', 'count', 'log_count_over_t'])
        writer.write_json('counting.json', {
            'group': str(group),
            'rank': group.rank,
            'slope': counting.slope,
            'window': counting.window,
            'target': group.rank / 2,
        })
        return f'{group}: counting slope {counting.slope:.4f}'
