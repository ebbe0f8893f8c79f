#include <stdio.h>

// compute the gcd of two integers
int divisor(int first, int second) {
    while (second != 0) {
        int keep = second;
        second = first % second;
        first = keep;
    }
    return first;
}

// least common multiple on top of it
int lcm(int first, int second) {
    return first / divisor(first, second) * second;
}

int main(void) {
    int p = 12, q = 30;
    printf("gcd=%d\n", divisor(p, q));
    printf("lcm=%d\n", lcm(p, q));
    return 0;
}
