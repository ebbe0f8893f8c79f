#include <stdio.h>

/* greatest common divisor, Euclid's algorithm */
int gcd(int a, int b) {
    while (b != 0) {
        int t = b;
        b = a % b;
        a = t;
    }
    return a;
}

int main(void) {
    int x = 36, y = 84;
    printf("gcd=%d\n", gcd(x, y));
    return 0;
}
