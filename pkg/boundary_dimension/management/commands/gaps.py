from boundary_dimension.boxdim import gap_exponent_bounds
from boundary_dimension.management.base import ComputationCommand


class Command(ComputationCommand):
    help = 'Gap exponents: liminf and limsup of log n / -log(n-th largest length)'
    subcommand = 'gaps'

    def run(self, config):
        partition = self.partition(config)
        log_n_max = config.number('gaps.log_n_max', 1e12, positive=True)
        samples = config.integer('gaps.samples', 4000, minimum=2)
        estimate = gap_exponent_bounds(partition, log_n_max, samples, config.get('gaps.use_rule', True))
        writer = self.writer
        writer.write_csv('gaps.csv', [{'log_n': x, 'ratio': y} for x, y in zip(estimate.log_n, estimate.ratios)],
                         columns=['log_n', 'ratio'])
        writer.write_json('gaps.json', {
            'generator': partition.generator,
            'L_lower': estimate.L_lower,
            'L_upper': estimate.L_upper,
            'gap': estimate.gap,
            'resolution': estimate.resolution,
            'sampled_to_log_n': estimate.sampled_to,
        })
        return f'{partition.generator}: L in [{estimate.L_lower:.4f}, {estimate.L_upper:.4f}]'
