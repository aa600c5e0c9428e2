from boundary_dimension.interval_partition import BranchMap
from boundary_dimension.management.base import ComputationCommand
from boundary_dimension.pressure import (
    bowen_root, brackets_nested, intersect_roots, pressure_cylinder_bracket, pressure_linear
)


class Command(ComputationCommand):
    help = 'Certified bracket of the Bowen root inf{t : P(t) <= 0}'
    subcommand = 'bowen'

    def run(self, config):
        partition = self.partition(config)
        t_range = config.vector('bowen.t_range', [0.0, 2.0], length=2)
        tol = config.number('bowen.tol', 1e-9, positive=True)
        method = config.choice('bowen.method', ('linear', 'cylinder'), 'linear')
        report = {'generator': partition.generator, 'method': method, 't_range': t_range}

        if method == 'linear':
            root = bowen_root(lambda t: pressure_linear(partition, t, config.threads), t_range, tol)
            report['root'] = root
            low, high = root.low, root.high
        else:
            low, high = self.cylinder_root(config, BranchMap(partition), t_range, tol, report)

        report['intersection'] = {'low': low, 'high': high, 'width': high - low, 'empty': high < low}
        self.writer.write_json('bowen.json', report)
        return f'{partition.generator}: Bowen root in [{low:.10g}, {high:.10g}]'

    def cylinder_root(self, config, branch_map, t_range, tol, report):
        """Roots of the cylinder brackets at several orders, intersected."""
        orders = [config.integer(f'bowen.orders.{index}', minimum=1)
                  for index in range(len(config.get('bowen.orders', [])))] or [8, 12, 16]
        alphabet = config.integer('bowen.alphabet', None, minimum=2)
        self.truncations['bowen.orders'] = orders

        def bracket(t, order):
            return pressure_cylinder_bracket(branch_map, t, order, alphabet, config.threads)

        roots = []
        for order in orders:
            root = bowen_root(lambda t: bracket(t, order), t_range, tol)
            sample = bracket(root.estimate, order)
            bound = 2 * sample.distortion.width_bound(root.estimate)
            roots.append({'order': order, 'root': root, 'bracket_width': sample.width, 'width_bound': bound,
                          'within_width_bound': sample.width <= bound})
        low, high = intersect_roots([entry['root'] for entry in roots])

        # Certified nesting holds between an order and its multiples
        t = 0.5 * (low + high)
        report['orders'] = roots
        report['nesting'] = [
            {'orders': [outer, inner], 'nested': brackets_nested(bracket(t, outer), bracket(t, inner))}
            for outer in orders for inner in orders if inner > outer and inner % outer == 0
        ]
        return low, high
