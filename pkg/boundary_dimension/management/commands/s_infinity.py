from boundary_dimension.management.base import ComputationCommand
from boundary_dimension.pressure import S_INFINITY_METHODS, find_s_infinity


class Command(ComputationCommand):
    help = 'Bracket the threshold s_inf below which the pressure is infinite'
    subcommand = 's-infinity'

    def run(self, config):
        partition = self.partition(config)
        method = None
        if config.get('s_infinity.method', None) is not None:
            method = config.choice('s_infinity.method', S_INFINITY_METHODS)
        estimate = find_s_infinity(partition, config.tolerance, method=method, threads=config.threads)
        writer = self.writer
        writer.write_csv('s_infinity_evidence.csv', [{'n': n, 'partial_sum': value} for n, value in estimate.evidence],
                         columns=['n', 'partial_sum'])
        writer.write_json('s_infinity.json', {'generator': partition.generator, 's_infinity': estimate})
        return (f'{partition.generator}: s_inf in [{estimate.s_low:.6g}, {estimate.s_high:.6g}] by {estimate.method}, '
                f'{estimate.divergence_behavior.value}')
